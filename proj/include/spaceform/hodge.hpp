// SPDX-License-Identifier: Apache-2.0
//
// Three-way splitting of 1-cochains, alpha = d beta + delta omega + gamma,
// with beta and omega supported away from the boundary collar, plus the
// diagnostics that go with it.
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/complex.hpp>
#include <spaceform/dec.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/geometry.hpp>
#include <spaceform/solve.hpp>

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace spaceform {

/// Internal cross-check failed (e.g. path-dependent stream function).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

struct SplitDiagnostics {
    double alpha_norm_sq = 0.0;   ///< ||alpha||^2 in the chosen space
    double exact_norm_sq = 0.0;   ///< ||d beta||^2
    double coexact_norm_sq = 0.0; ///< ||delta omega||^2
    double harmonic_norm_sq = 0.0;///< ||gamma||^2

    double reconstruction_residual = 0.0; ///< ||alpha - d beta - delta omega - gamma|| / ||alpha||
    double exact_coexact = 0.0;   ///< <d beta, delta omega>
    double exact_harmonic = 0.0;  ///< <d beta, gamma>
    double coexact_harmonic = 0.0;///< <delta omega, gamma>
    double pythagoras_defect = 0.0; ///< ||alpha||^2 - sum of the three squared norms

    double d_gamma_l2 = 0.0;      ///< ||d gamma||, all faces
    double delta_gamma_l2 = 0.0;  ///< ||delta gamma||, interior vertices

    double cross_block = 0.0;     ///< max |Gram(d, delta)| / max |Gram|
    int iterations = 0;
    double solver_residual = 0.0;

    /// Largest pairwise inner product divided by ||alpha||^2.
    double orthogonality_defect() const
    {
        if (alpha_norm_sq == 0.0) return 0.0;
        return std::max({std::abs(exact_coexact), std::abs(exact_harmonic), std::abs(coexact_harmonic)}) /
               alpha_norm_sq;
    }
};

struct HodgeSplit {
    Space space = Space::L2;
    Cochain beta;  ///< degree 0, zero on boundary vertices
    Cochain omega; ///< degree 2, zero on collar faces
    Cochain exact;   ///< d beta
    Cochain coexact; ///< delta omega
    Cochain gamma;   ///< alpha - d beta - delta omega
    SplitDiagnostics diagnostics;
};

namespace detail {

inline void append_block(
    std::vector<Eigen::Triplet<double>>& out, const SparseMatrix& block, Eigen::Index row0, Eigen::Index col0)
{
    for (int j = 0; j < block.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(block, j); it; ++it) {
            out.emplace_back(
                static_cast<int>(row0 + it.row()), static_cast<int>(col0 + it.col()), it.value());
        }
    }
}

inline double max_abs(const SparseMatrix& m)
{
    double best = 0.0;
    for (int j = 0; j < m.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) best = std::max(best, std::abs(it.value()));
    }
    return best;
}

} // namespace detail

/// Splits a 1-cochain by solving the joint least-squares problem
///
///     min over interior beta, omega of  || alpha - d beta - delta omega ||^2
///
/// in the chosen space through its block normal equations. The harmonic part
/// is the remainder, so reconstruction holds by construction and the split is
/// orthogonal up to the solver tolerance. Interior support removes the
/// constant kernel of d, so the Gram system is SPD without pinning.
inline HodgeSplit decompose(
    const Cochain& alpha,
    Space kind,
    const SimplicialComplex& complex,
    const StarWeights& stars,
    const SolveConfig& cfg = {.preconditioner = Preconditioner::Cholesky})
{
    if (alpha.degree != 1) throw DegreeError("decompose expects a 1-cochain");
    require_matches(alpha, complex);
    const auto space = InnerProductSpace::make(kind, 1, stars.curvature);

    const DecOperators ops(complex, stars);
    const SparseMatrix p0 = complex.interior_embedding(0);
    const SparseMatrix p2 = complex.interior_embedding(2);
    if (p0.cols() == 0 || p2.cols() == 0) {
        throw PreconditionError("mesh has no interior vertices or no interior faces");
    }

    const SparseMatrix exact_basis = ops.d0 * p0;      // E x Vi
    const SparseMatrix coexact_basis = ops.delta2 * p2;// E x Fi
    const SparseMatrix m = gram_matrix(space, complex, ops);
    const SparseMatrix m_exact = m * exact_basis;
    const SparseMatrix m_coexact = m * coexact_basis;

    const SparseMatrix g_dd = exact_basis.transpose() * m_exact;
    const SparseMatrix g_dc = exact_basis.transpose() * m_coexact;
    const SparseMatrix g_cc = coexact_basis.transpose() * m_coexact;

    const Eigen::Index nb = p0.cols();
    const Eigen::Index nw = p2.cols();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(g_dd.nonZeros() + 2 * g_dc.nonZeros() + g_cc.nonZeros()));
    detail::append_block(trip, g_dd, 0, 0);
    detail::append_block(trip, g_dc, 0, nb);
    detail::append_block(trip, SparseMatrix(g_dc.transpose()), nb, 0);
    detail::append_block(trip, g_cc, nb, nb);
    SparseMatrix gram(nb + nw, nb + nw);
    gram.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs(nb + nw);
    const Eigen::VectorXd m_alpha = m * alpha.values;
    rhs.head(nb) = exact_basis.transpose() * m_alpha;
    rhs.tail(nw) = coexact_basis.transpose() * m_alpha;

    // Unit-diagonal scaling keeps the attainable residual well below the
    // tolerance on meshes with a few tiny cotangent weights.
    const Eigen::VectorXd scale = gram.diagonal().cwiseSqrt().cwiseInverse();
    const SparseMatrix scaled = scale.asDiagonal() * gram * scale.asDiagonal();
    SolveResult sol = solve_spd(scaled, scale.cwiseProduct(rhs), cfg);
    sol.x = scale.cwiseProduct(sol.x);

    HodgeSplit out;
    out.space = kind;
    out.beta = Cochain(0, p0 * sol.x.head(nb));
    out.omega = Cochain(2, p2 * sol.x.tail(nw));
    out.exact = apply_d(out.beta, complex);
    out.coexact = codifferential(out.omega, complex, stars);
    out.gamma = Cochain(1, alpha.values - out.exact.values - out.coexact.values);

    auto& dg = out.diagnostics;
    auto ip = [&](const Cochain& u, const Cochain& v) { return inner(u, v, space, complex, stars); };
    dg.alpha_norm_sq = ip(alpha, alpha);
    dg.exact_norm_sq = ip(out.exact, out.exact);
    dg.coexact_norm_sq = ip(out.coexact, out.coexact);
    dg.harmonic_norm_sq = ip(out.gamma, out.gamma);
    dg.exact_coexact = ip(out.exact, out.coexact);
    dg.exact_harmonic = ip(out.exact, out.gamma);
    dg.coexact_harmonic = ip(out.coexact, out.gamma);
    dg.pythagoras_defect = dg.alpha_norm_sq - dg.exact_norm_sq - dg.coexact_norm_sq - dg.harmonic_norm_sq;
    const Cochain recon = alpha - out.exact - out.coexact - out.gamma;
    dg.reconstruction_residual =
        dg.alpha_norm_sq > 0.0 ? std::sqrt(std::max(ip(recon, recon), 0.0) / dg.alpha_norm_sq) : 0.0;

    const Cochain d_gamma = apply_d(out.gamma, complex);
    const Cochain delta_gamma = codifferential(out.gamma, complex, stars);
    dg.d_gamma_l2 = std::sqrt(l2_inner(d_gamma, d_gamma, stars));
    dg.delta_gamma_l2 = std::sqrt(l2_inner_interior(delta_gamma, delta_gamma, complex, stars));

    const double gmax = std::max(detail::max_abs(g_dd), detail::max_abs(g_cc));
    dg.cross_block = gmax > 0.0 ? detail::max_abs(g_dc) / gmax : 0.0;
    dg.iterations = sol.iterations;
    dg.solver_residual = sol.relative_residual;
    return out;
}

struct HarmonicReport {
    bool degenerate = false;
    double norm_sq = 0.0;          ///< ||gamma||^2 (L2)
    double energy = 0.0;           ///< ||d gamma||^2 + ||delta gamma||^2 + c ||gamma||^2
    double c = 0.0;
    std::optional<double> bound_ratio; ///< energy / (2 c ||gamma||^2), when c > 0
    double closed_residual = 0.0;  ///< ||d gamma|| / ||gamma||
    double coclosed_residual = 0.0;///< ||delta gamma|| / ||gamma|| over interior vertices
};

/// Energy of a 1-cochain as the squared covariant-derivative norm of the
/// smooth identity ||grad u||^2 = ||du||^2 + ||d*u||^2 + a^2 k (N - k) ||u||^2,
/// and its ratio to the 2 a^2 k (N - k) ||u||^2 bound for harmonic forms.
inline HarmonicReport harmonic_diagnostics(
    const Cochain& gamma, const SimplicialComplex& complex, const StarWeights& stars)
{
    if (gamma.degree != 1) throw DegreeError("harmonic diagnostics expect a 1-cochain");
    require_matches(gamma, complex);
    const auto space = InnerProductSpace::make(Space::H1, 1, stars.curvature);

    HarmonicReport r;
    r.c = space.c;
    r.norm_sq = l2_inner(gamma, gamma, stars);
    if (r.norm_sq == 0.0) {
        r.degenerate = true;
        return r;
    }
    const Cochain dg = apply_d(gamma, complex);
    const Cochain sg = codifferential(gamma, complex, stars);
    const double d_sq = l2_inner(dg, dg, stars);
    const double s_sq = l2_inner_interior(sg, sg, complex, stars);
    r.energy = d_sq + s_sq + space.c * r.norm_sq;
    if (space.c > 0.0) r.bound_ratio = r.energy / (2.0 * space.c * r.norm_sq);
    r.closed_residual = std::sqrt(d_sq / r.norm_sq);
    r.coclosed_residual = std::sqrt(s_sq / r.norm_sq);
    return r;
}

struct StreamResult {
    Eigen::VectorXd f; ///< one value per face
    Cochain omega;     ///< degree 2, Star2 omega = f
    double residual = 0.0; ///< ||delta omega - v|| / ||v|| (L2)
    int tree_edges = 0;
    int checked_cycles = 0;
};

/// Integrates a co-closed, collar-free 1-cochain v to a face potential f with
/// delta(f * area) = v.
///
/// Star1 v is a closed dual 1-cochain; f is accumulated along a breadth-first
/// spanning tree of the face adjacency graph rooted at the lowest-index face
/// touching the boundary, and every non-tree dual edge is checked for path
/// independence.
inline StreamResult stream_function(
    const Cochain& v, const SimplicialComplex& complex, const StarWeights& stars, const SolveConfig& cfg = {})
{
    if (v.degree != 1) throw DegreeError("stream_function expects a 1-cochain");
    require_matches(v, complex);

    const Eigen::VectorXd flux = stars.star1.cwiseProduct(v.values);
    const double scale = flux.size() ? flux.cwiseAbs().maxCoeff() : 0.0;
    const double vscale = v.values.size() ? v.values.cwiseAbs().maxCoeff() : 0.0;
    const double tol = cfg.tolerance;

    // Co-closedness at interior vertices.
    const Eigen::VectorXd div = complex.d0().transpose() * flux;
    int worst = -1;
    double worst_val = 0.0;
    for (int vtx = 0; vtx < complex.num_vertices(); ++vtx) {
        if (complex.is_boundary_vertex(vtx)) continue;
        if (std::abs(div[vtx]) > worst_val) {
            worst_val = std::abs(div[vtx]);
            worst = vtx;
        }
    }
    if (worst >= 0 && worst_val > tol * scale) {
        throw PreconditionError(
            "input is not co-closed: vertex " + std::to_string(worst) + " has divergence " +
            detail::sci(worst_val) + " (scale " + detail::sci(scale) + ")");
    }
    const auto& interior_edge = complex.interior(1);
    for (int e = 0; e < complex.num_edges(); ++e) {
        if (!interior_edge[static_cast<std::size_t>(e)] && std::abs(v.values[e]) > tol * vscale) {
            throw PreconditionError("input does not vanish on the boundary collar (edge " + std::to_string(e) + ")");
        }
    }

    const int nf = complex.num_faces();
    const auto& interior_face = complex.interior(2);
    int root = -1;
    for (int f = 0; f < nf && root < 0; ++f) {
        if (!interior_face[static_cast<std::size_t>(f)]) root = f;
    }
    if (root < 0) throw TopologyError("no face touches the boundary");

    StreamResult out;
    out.f = Eigen::VectorXd::Zero(nf);
    std::vector<bool> seen(static_cast<std::size_t>(nf), false);
    std::vector<bool> tree_edge(static_cast<std::size_t>(complex.num_edges()), false);
    std::queue<int> frontier;
    seen[static_cast<std::size_t>(root)] = true;
    frontier.push(root);
    while (!frontier.empty()) {
        const int fa = frontier.front();
        frontier.pop();
        for (const auto& inc : complex.face_edges(fa)) {
            const auto& faces = complex.edge_faces(inc.index);
            if (faces.size() != 2) continue;
            const auto& other = faces[0].index == fa ? faces[1] : faces[0];
            if (seen[static_cast<std::size_t>(other.index)]) continue;
            // inc.sign * f[fa] + other.sign * f[fb] = flux[e], other.sign = -inc.sign.
            out.f[other.index] = out.f[fa] - inc.sign * flux[inc.index];
            seen[static_cast<std::size_t>(other.index)] = true;
            tree_edge[static_cast<std::size_t>(inc.index)] = true;
            ++out.tree_edges;
            frontier.push(other.index);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw TopologyError("face adjacency graph is disconnected");
    }

    for (int e = 0; e < complex.num_edges(); ++e) {
        if (tree_edge[static_cast<std::size_t>(e)]) continue;
        double lhs = 0.0;
        for (const auto& inc : complex.edge_faces(e)) lhs += inc.sign * out.f[inc.index];
        if (std::abs(lhs - flux[e]) > tol * std::max(scale, std::numeric_limits<double>::min()) * 100.0) {
            throw ConsistencyError(
                "stream function is path dependent across edge " + std::to_string(e) + " (mismatch " +
                detail::sci(std::abs(lhs - flux[e])) + ")");
        }
        ++out.checked_cycles;
    }
    for (int f = 0; f < nf; ++f) {
        if (!interior_face[static_cast<std::size_t>(f)]) out.f[f] = 0.0;
    }

    out.omega = Cochain(2, out.f.cwiseQuotient(stars.star2));
    const Cochain back = codifferential(out.omega, complex, stars);
    const double vnorm = std::sqrt(l2_inner(v, v, stars));
    const Cochain diff = back - v;
    const double dnorm = std::sqrt(l2_inner(diff, diff, stars));
    out.residual = vnorm > 0.0 ? dnorm / vnorm : dnorm;
    if (out.residual > tol) {
        throw ConsistencyError("stream function reconstruction residual " + detail::sci(out.residual));
    }
    return out;
}

/// Largest geodesic radius the mesh covers (provenance when available).
inline double mesh_radius(const TriMesh& mesh)
{
    if (mesh.provenance()) return mesh.provenance()->rho_max;
    double r = 0.0;
    for (const auto& p : mesh.vertices()) r = std::max(r, geodesic_radius(p, mesh.curvature()));
    return r;
}

/// Edgewise cutoff product: (phi_R gamma)[e] = mean of phi_R at e's ends times gamma[e].
inline Cochain cutoff_product(const Cochain& gamma, const Cochain& phi, const SimplicialComplex& complex)
{
    if (gamma.degree != 1 || phi.degree != 0) throw DegreeError("cutoff_product expects a 1-cochain and a 0-cochain");
    require_matches(gamma, complex);
    require_matches(phi, complex);
    Cochain out = gamma;
    for (int e = 0; e < complex.num_edges(); ++e) {
        const auto [i, j] = complex.edges()[static_cast<std::size_t>(e)];
        out.values[e] *= 0.5 * (phi.values[i] + phi.values[j]);
    }
    return out;
}

/// Distance from gamma to its cutoff phi_R gamma in the chosen space.
inline double truncation_distance(
    const Cochain& gamma,
    double radius,
    Space kind,
    const TriMesh& mesh,
    const SimplicialComplex& complex,
    const StarWeights& stars)
{
    if (2.0 * radius > mesh_radius(mesh) * (1.0 + 1e-12)) {
        throw DomainError("cutoff support 2R exceeds the meshed ball");
    }
    const Cochain phi = cutoff_cochain(mesh, radius);
    const Cochain diff = cutoff_product(gamma, phi, complex) - gamma;
    return norm(diff, InnerProductSpace::make(kind, 1, mesh.curvature()), complex, stars);
}

} // namespace spaceform
