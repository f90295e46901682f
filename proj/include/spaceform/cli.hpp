// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: mesh, decompose, stream, verify-tensor, convergence,
// truncate. Exit status 0 on success, 1 on validation errors, 2 when a solve
// does not converge.
#pragma once

#include <spaceform/complex.hpp>
#include <spaceform/dec.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/forms.hpp>
#include <spaceform/geometry.hpp>
#include <spaceform/hodge.hpp>
#include <spaceform/io.hpp>
#include <spaceform/weitzenbock.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

namespace spaceform::cli {

enum ExitCode : int { Success = 0, ValidationFailure = 1, NoConvergence = 2 };

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Loaded {
    TriMesh mesh;
    SimplicialComplex complex;
    StarWeights stars;

    explicit Loaded(TriMesh m) : mesh(std::move(m)), complex(mesh), stars(assemble_stars(mesh, complex)) {}
};

constexpr const char* builtin_prefix = "builtin:";

inline Cochain load_form(const std::string& spec, const Loaded& in, std::uint64_t seed)
{
    if (spec.rfind(builtin_prefix, 0) == 0) {
        return builtin_form(spec.substr(std::string(builtin_prefix).size()), in.mesh, in.complex, in.stars, seed);
    }
    Cochain c = cochain_from_json(read_json(spec), in.mesh.checksum());
    require_matches(c, in.complex);
    return c;
}

inline std::string csv_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) throw FormatError("cannot write '" + path + "'");
    file << text;
}

} // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Hodge decompositions of discrete 1-forms on hyperbolic and flat disks", "spaceform"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    Json echo = Json::array();
    for (const auto& a : args) echo.push_back(a);

    double curvature = 1.0;
    double radius = 3.0;
    double edge = 0.1;
    double tolerance = 1e-10;
    std::uint64_t seed = 1;
    bool deterministic = false;
    std::string mesh_path, form_spec, out_path, space_name = "h1", emit_form, form_out;
    int max_dim = 5, trials = 50, levels = 3, max_iterations = 200000;
    double coarse_edge = 0.2;
    std::vector<double> radii;

    auto* mesh_cmd = app.add_subcommand("mesh", "Generate a geodesic-ball mesh");
    mesh_cmd->add_option("--curvature", curvature, "a >= 0 (curvature -a^2)")->required();
    mesh_cmd->add_option("--radius", radius, "geodesic radius rho_max")->required();
    mesh_cmd->add_option("--edge", edge, "target edge length h")->required();
    mesh_cmd->add_option("--out", out_path, "mesh file")->required();
    mesh_cmd->add_option("--emit-form", emit_form, "also write builtin:NAME as a cochain file");
    mesh_cmd->add_option("--form-out", form_out, "path for --emit-form");
    mesh_cmd->add_option("--seed", seed, "seed for random built-in forms");

    auto* dec_cmd = app.add_subcommand("decompose", "Split a 1-cochain into exact, coexact and harmonic parts");
    dec_cmd->add_option("--mesh", mesh_path, "mesh file")->required();
    dec_cmd->add_option("--form", form_spec, "cochain file or builtin:dx|exact|coexact|mixed")->required();
    dec_cmd->add_option("--space", space_name, "l2 or h1")->check(CLI::IsMember({"l2", "h1", "L2", "H1"}));
    dec_cmd->add_option("--tol", tolerance, "relative solver tolerance");
    dec_cmd->add_option("--max-iter", max_iterations, "conjugate gradient iteration cap")->check(CLI::NonNegativeNumber);
    dec_cmd->add_option("--out", out_path, "report file")->required();
    dec_cmd->add_option("--seed", seed, "seed for random built-in forms");
    dec_cmd->add_flag("--deterministic", deterministic, "omit wall-clock timings");

    auto* stream_cmd = app.add_subcommand("stream", "Stream function of a co-closed, collar-free 1-cochain");
    stream_cmd->add_option("--mesh", mesh_path, "mesh file")->required();
    stream_cmd->add_option("--form", form_spec, "cochain file or builtin:NAME")->required();
    stream_cmd->add_option("--out", out_path, "report file")->required();
    stream_cmd->add_option("--tol", tolerance, "relative tolerance of the checks");
    stream_cmd->add_option("--seed", seed, "seed for random built-in forms");
    stream_cmd->add_flag("--deterministic", deterministic, "omit wall-clock timings");

    auto* tensor_cmd = app.add_subcommand("verify-tensor", "Exact checks of the constant-curvature identities");
    tensor_cmd->add_option("--max-dim", max_dim, "largest dimension N (2..6)");
    tensor_cmd->add_option("--trials", trials, "random contexts per (N, k)");
    tensor_cmd->add_option("--seed", seed, "seed");
    tensor_cmd->add_option("--out", out_path, "report file (default: stdout)");

    auto* conv_cmd = app.add_subcommand("convergence", "Harmonicity residuals under mesh refinement");
    conv_cmd->add_option("--curvature", curvature, "a >= 0")->required();
    conv_cmd->add_option("--radius", radius, "geodesic radius rho_max")->required();
    conv_cmd->add_option("--levels", levels, "refinement levels")->required()->check(CLI::Range(1, 8));
    conv_cmd->add_option("--form", form_spec, "builtin:NAME")->required();
    conv_cmd->add_option("--edge", coarse_edge, "edge length of the coarsest level (halved per level)");
    conv_cmd->add_option("--space", space_name, "l2 or h1")->check(CLI::IsMember({"l2", "h1", "L2", "H1"}));
    conv_cmd->add_option("--tol", tolerance, "relative solver tolerance");
    conv_cmd->add_option("--seed", seed, "seed for random built-in forms");
    conv_cmd->add_option("--out", out_path, "CSV file (default: stdout)");

    auto* trunc_cmd = app.add_subcommand("truncate", "Distance from a form to its cutoff phi_R form");
    trunc_cmd->add_option("--radii", radii, "comma separated cutoff radii R > 1")->required()->delimiter(',');
    trunc_cmd->add_option("--mesh", mesh_path, "mesh file (default: generated from --curvature/--radius/--edge)");
    trunc_cmd->add_option("--curvature", curvature, "a >= 0")->default_val(1.0);
    trunc_cmd->add_option("--radius", radius, "geodesic radius rho_max")->default_val(6.0);
    trunc_cmd->add_option("--edge", edge, "target edge length h")->default_val(0.1);
    trunc_cmd->add_option("--form", form_spec, "cochain file or builtin:NAME")->default_val("builtin:dx");
    trunc_cmd->add_option("--space", space_name, "l2 or h1")->check(CLI::IsMember({"l2", "h1", "L2", "H1"}));
    trunc_cmd->add_option("--seed", seed, "seed for random built-in forms");
    trunc_cmd->add_option("--out", out_path, "CSV file (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return ValidationFailure;
    }

    try {
        const auto t0 = detail::Clock::now();
        SolveConfig cfg;
        cfg.tolerance = tolerance;
        cfg.preconditioner = Preconditioner::Cholesky;
        cfg.deterministic = deterministic;
        cfg.max_iterations = max_iterations;

        if (mesh_cmd->parsed()) {
            const detail::Loaded in(ball_mesh(Curvature(curvature), radius, edge));
            write_json(out_path, to_json(in.mesh));
            if (!emit_form.empty()) {
                if (form_out.empty()) throw PreconditionError("--emit-form needs --form-out");
                const Cochain c = builtin_form(emit_form, in.mesh, in.complex, in.stars, seed);
                write_json(form_out, to_json(c, in.mesh.checksum()));
            }
            Json summary = {
                {"mesh_checksum", in.mesh.checksum()},
                {"vertices", in.complex.num_vertices()},
                {"edges", in.complex.num_edges()},
                {"faces", in.complex.num_faces()},
                {"boundary_vertices", in.complex.num_boundary_vertices()},
                {"total_area", in.mesh.total_area()},
                {"min_star1", in.stars.star1.minCoeff()},
                {"obtuse_clamps", in.stars.obtuse_clamps},
            };
            out << summary.dump(1) << '\n';
            return Success;
        }

        if (dec_cmd->parsed()) {
            const detail::Loaded in(mesh_from_json(read_json(mesh_path)));
            const Cochain alpha = detail::load_form(form_spec, in, seed);
            const auto t1 = detail::Clock::now();
            const HodgeSplit split = decompose(alpha, parse_space(space_name), in.complex, in.stars, cfg);
            const double solve_time = detail::seconds_since(t1);

            Json report;
            report["command"] = echo;
            report["mesh_checksum"] = in.mesh.checksum();
            report["form"] = form_spec;
            report["seed"] = seed;
            report["tolerance"] = tolerance;
            report["obtuse_clamps"] = in.stars.obtuse_clamps;
            report["harmonic"] = to_json(harmonic_diagnostics(split.gamma, in.complex, in.stars));
            report["split"] = to_json(split, in.mesh.checksum());
            if (!deterministic) report["timings"] = {{"decompose_s", solve_time}, {"total_s", detail::seconds_since(t0)}};
            write_json(out_path, report);

            const auto& d = split.diagnostics;
            out << "space " << to_string(split.space) << "  |alpha|^2 " << d.alpha_norm_sq << "  exact "
                << d.exact_norm_sq << "  coexact " << d.coexact_norm_sq << "  harmonic " << d.harmonic_norm_sq
                << "  orthogonality " << d.orthogonality_defect() << "  iterations " << d.iterations << '\n';
            return Success;
        }

        if (stream_cmd->parsed()) {
            const detail::Loaded in(mesh_from_json(read_json(mesh_path)));
            const Cochain v = detail::load_form(form_spec, in, seed);
            const StreamResult s = stream_function(v, in.complex, in.stars, cfg);
            Json report;
            report["command"] = echo;
            report["form"] = form_spec;
            report["stream"] = to_json(s, in.mesh.checksum());
            if (!deterministic) report["timings"] = {{"total_s", detail::seconds_since(t0)}};
            write_json(out_path, report);
            out << "stream function residual " << s.residual << "  tree edges " << s.tree_edges
                << "  checked cycles " << s.checked_cycles << '\n';
            return Success;
        }

        if (tensor_cmd->parsed()) {
            const TensorSuiteReport r = verify_tensor_identities(max_dim, trials, seed);
            Json report = to_json(r);
            report["command"] = echo;
            if (!out_path.empty()) write_json(out_path, report);
            for (const auto& p : r.pairs) {
                out << "N=" << p.N << " k=" << p.k << "  " << p.passed << "/" << p.trials
                    << (p.passed == p.trials ? "  pass" : "  FAIL") << '\n';
            }
            if (out_path.empty()) out << report.dump(1) << '\n';
            return r.passed() ? Success : ValidationFailure;
        }

        if (conv_cmd->parsed()) {
            if (form_spec.rfind(detail::builtin_prefix, 0) != 0) {
                throw PreconditionError("convergence needs a builtin:NAME form (each level has its own mesh)");
            }
            const Space space = parse_space(space_name);
            std::string csv = "level,h,d_residual,delta_residual,energy_ratio,orthogonality_defect,input_delta_residual\n";
            double h = coarse_edge;
            for (int level = 0; level < levels; ++level, h *= 0.5) {
                const detail::Loaded in(ball_mesh(Curvature(curvature), radius, h));
                const Cochain alpha = detail::load_form(form_spec, in, seed);
                const HodgeSplit split = decompose(alpha, space, in.complex, in.stars, cfg);
                const HarmonicReport hr = harmonic_diagnostics(split.gamma, in.complex, in.stars);
                const Cochain da = codifferential(alpha, in.complex, in.stars);
                const double a2 = l2_inner(alpha, alpha, in.stars);
                const double input_delta = a2 > 0.0 ? std::sqrt(l2_inner_interior(da, da, in.complex, in.stars) / a2) : 0.0;
                csv += std::to_string(level) + "," + detail::csv_number(h) + "," +
                       detail::csv_number(hr.closed_residual) + "," + detail::csv_number(hr.coclosed_residual) + "," +
                       (hr.bound_ratio ? detail::csv_number(*hr.bound_ratio) : std::string()) + "," +
                       detail::csv_number(split.diagnostics.orthogonality_defect()) + "," +
                       detail::csv_number(input_delta) + "\n";
            }
            detail::emit(out_path, csv, out);
            return Success;
        }

        if (trunc_cmd->parsed()) {
            const detail::Loaded in(
                mesh_path.empty() ? ball_mesh(Curvature(curvature), radius, edge) : mesh_from_json(read_json(mesh_path)));
            const Cochain gamma = detail::load_form(form_spec, in, seed);
            const Space space = parse_space(space_name);
            const double h = in.mesh.provenance() ? in.mesh.provenance()->edge : 0.0;
            std::string csv = "R,distance,max_slope,slope_bound,h_over_R\n";
            for (double r : radii) {
                const double dist = truncation_distance(gamma, r, space, in.mesh, in.complex, in.stars);
                csv += detail::csv_number(r) + "," + detail::csv_number(dist) + "," +
                       detail::csv_number(max_cutoff_slope(in.mesh, r)) + "," + detail::csv_number(2.0 / r) + "," +
                       detail::csv_number(h / r) + "\n";
            }
            detail::emit(out_path, csv, out);
            return Success;
        }
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return NoConvergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return ValidationFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return ValidationFailure;
    }
    return ValidationFailure;
}

} // namespace spaceform::cli
