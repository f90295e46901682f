// SPDX-License-Identifier: Apache-2.0
//
// JSON interchange for meshes, cochains and reports.
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/geometry.hpp>
#include <spaceform/hodge.hpp>
#include <spaceform/weitzenbock.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace spaceform {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
T field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

inline Json vector_json(const Eigen::VectorXd& v)
{
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

} // namespace detail

inline Json to_json(const TriMesh& mesh)
{
    Json j;
    j["curvature"] = mesh.curvature().a;
    Json verts = Json::array();
    for (const auto& p : mesh.vertices()) verts.push_back({p.x, p.y});
    j["vertices"] = std::move(verts);
    Json tris = Json::array();
    for (const auto& t : mesh.triangles()) tris.push_back({t[0], t[1], t[2]});
    j["triangles"] = std::move(tris);
    if (mesh.provenance()) {
        j["provenance"] = {{"rho_max", mesh.provenance()->rho_max}, {"h", mesh.provenance()->edge}};
    } else {
        j["provenance"] = nullptr;
    }
    return j;
}

inline TriMesh mesh_from_json(const Json& j)
{
    const auto a = detail::field<double>(j, "curvature");
    const auto raw_vertices = detail::field<std::vector<std::array<double, 2>>>(j, "vertices");
    const auto triangles = detail::field<std::vector<Triangle>>(j, "triangles");
    std::vector<DiskPoint> vertices;
    vertices.reserve(raw_vertices.size());
    for (const auto& p : raw_vertices) vertices.push_back({p[0], p[1]});

    std::optional<MeshProvenance> provenance;
    if (j.contains("provenance") && !j["provenance"].is_null()) {
        const Json& p = j["provenance"];
        provenance = MeshProvenance{detail::field<double>(p, "rho_max"), detail::field<double>(p, "h")};
    }
    return TriMesh(Curvature(a), std::move(vertices), triangles, provenance);
}

inline Json to_json(const Cochain& c, const std::string& mesh_checksum)
{
    Json j;
    j["degree"] = c.degree;
    j["mesh_checksum"] = mesh_checksum;
    j["values"] = detail::vector_json(c.values);
    return j;
}

/// Loads a cochain and rejects it unless it was written against `mesh_checksum`.
inline Cochain cochain_from_json(const Json& j, const std::string& mesh_checksum)
{
    const auto degree = detail::field<int>(j, "degree");
    const auto checksum = detail::field<std::string>(j, "mesh_checksum");
    if (checksum != mesh_checksum) {
        throw FormatError("cochain was built against mesh " + checksum + ", not " + mesh_checksum);
    }
    if (degree < 0 || degree > 2) throw FormatError("cochain degree must be 0, 1 or 2");
    const auto values = detail::field<std::vector<double>>(j, "values");
    return {degree, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))};
}

inline Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_json(const std::string& path, const Json& j)
{
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
    if (!out) throw FormatError("failed writing '" + path + "'");
}

inline Json to_json(const SplitDiagnostics& d)
{
    return {
        {"alpha_norm_sq", d.alpha_norm_sq},
        {"exact_norm_sq", d.exact_norm_sq},
        {"coexact_norm_sq", d.coexact_norm_sq},
        {"harmonic_norm_sq", d.harmonic_norm_sq},
        {"reconstruction_residual", d.reconstruction_residual},
        {"inner_exact_coexact", d.exact_coexact},
        {"inner_exact_harmonic", d.exact_harmonic},
        {"inner_coexact_harmonic", d.coexact_harmonic},
        {"orthogonality_defect", d.orthogonality_defect()},
        {"pythagoras_defect", d.pythagoras_defect},
        {"d_gamma_l2", d.d_gamma_l2},
        {"delta_gamma_l2", d.delta_gamma_l2},
        {"cross_block", d.cross_block},
        {"solver_iterations", d.iterations},
        {"solver_residual", d.solver_residual},
    };
}

inline Json to_json(const HarmonicReport& r)
{
    Json j = {
        {"degenerate", r.degenerate},
        {"norm_sq", r.norm_sq},
        {"c", r.c},
    };
    if (!r.degenerate) {
        j["energy"] = r.energy;
        j["bound_ratio"] = r.bound_ratio ? Json(*r.bound_ratio) : Json(nullptr);
        j["closed_residual"] = r.closed_residual;
        j["coclosed_residual"] = r.coclosed_residual;
    }
    return j;
}

inline Json to_json(const HodgeSplit& s, const std::string& mesh_checksum)
{
    Json j;
    j["mesh_checksum"] = mesh_checksum;
    j["space"] = to_string(s.space);
    j["beta"] = to_json(s.beta, mesh_checksum);
    j["omega"] = to_json(s.omega, mesh_checksum);
    j["exact"] = to_json(s.exact, mesh_checksum);
    j["coexact"] = to_json(s.coexact, mesh_checksum);
    j["gamma"] = to_json(s.gamma, mesh_checksum);
    j["diagnostics"] = to_json(s.diagnostics);
    return j;
}

inline Json to_json(const StreamResult& s, const std::string& mesh_checksum)
{
    Json j;
    j["mesh_checksum"] = mesh_checksum;
    j["f"] = detail::vector_json(s.f);
    j["omega"] = to_json(s.omega, mesh_checksum);
    j["diagnostics"] = {
        {"reconstruction_residual", s.residual},
        {"tree_edges", s.tree_edges},
        {"checked_cycles", s.checked_cycles},
    };
    return j;
}

inline Json to_json(const RationalMatrix& m)
{
    Json rows = Json::array();
    for (int i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.size(); ++j) row.push_back(to_string(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Context as exact "p/q" strings; alpha lists its nonzero components.
inline Json to_json(const RationalTensorContext& ctx)
{
    Json alpha = Json::array();
    for (std::size_t f = 0; f < ctx.alpha.entries(); ++f) {
        if (ctx.alpha[f] == 0) continue;
        alpha.push_back({{"index", ctx.alpha.unflat(f)}, {"value", to_string(ctx.alpha[f])}});
    }
    return {
        {"N", ctx.N},
        {"k", ctx.degree()},
        {"K", to_string(ctx.K)},
        {"g", to_json(ctx.g)},
        {"g_inv", to_json(ctx.g_inv)},
        {"alpha", std::move(alpha)},
    };
}

inline Json to_json(const TensorCheck& c)
{
    return {
        {"context_valid", c.context_valid},
        {"riemann_symmetries", c.riemann_symmetries},
        {"ricci_lower", c.ricci_lower},
        {"ricci_mixed", c.ricci_mixed},
        {"weitzenbock", c.weitzenbock},
        {"weitzenbock_antisymmetric", c.weitzenbock_antisymmetric},
        {"star_sign", c.star_sign},
        {"scale_covariance", c.scale_covariance},
    };
}

inline Json to_json(const TensorSuiteReport& r)
{
    Json pairs = Json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back({
            {"N", p.N},
            {"k", p.k},
            {"trials", p.trials},
            {"passed", p.passed},
            {"status", p.passed == p.trials ? "pass" : "fail"},
            {"expected_factor", "-K k (N - k)"},
            {"positive_factor_held", p.positive_factor_holds},
        });
    }
    Json failures = Json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"N", f.N}, {"k", f.k}, {"trial", f.trial}, {"checks", to_json(f.check)}, {"context", to_json(f.context)}});
    }
    return {{"seed", r.seed}, {"passed", r.passed()}, {"pairs", std::move(pairs)}, {"failures", std::move(failures)}};
}

} // namespace spaceform
