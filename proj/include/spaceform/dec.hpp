// SPDX-License-Identifier: Apache-2.0
//
// Diagonal Hodge stars, the codifferential, and the L2 / H1 inner products on
// cochains of a triangulated geodesic ball.
//
// Each curved triangle is replaced by the Euclidean triangle with the same
// geodesic side lengths. On that triangle the primal/dual length ratio of an
// edge is half the cotangent of the opposite angle, and vertex dual areas are
// mixed Voronoi areas (Meyer et al.), so the dual areas of a triangle add up
// to its area even when it is obtuse.
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/complex.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/geometry.hpp>

#include <Eigen/Sparse>

#include <string>

namespace spaceform {

struct StarWeights {
    Eigen::VectorXd star0; ///< dual cell areas, one per vertex
    Eigen::VectorXd star1; ///< dual / primal length ratios, one per edge
    Eigen::VectorXd star2; ///< inverse intrinsic areas, one per face
    Curvature curvature;
    int obtuse_clamps = 0; ///< faces whose Voronoi split was clamped

    const Eigen::VectorXd& of(int k) const
    {
        switch (k) {
        case 0: return star0;
        case 1: return star1;
        case 2: return star2;
        default: throw DegreeError("no Hodge star for degree " + std::to_string(k));
        }
    }

    /// Intrinsic (Euclidean-secant) area of face f.
    double face_area(int f) const { return 1.0 / star2[f]; }
};

inline StarWeights assemble_stars(const TriMesh& mesh, const SimplicialComplex& complex)
{
    StarWeights w;
    w.curvature = mesh.curvature();
    w.star0 = Eigen::VectorXd::Zero(complex.num_vertices());
    w.star1 = Eigen::VectorXd::Zero(complex.num_edges());
    w.star2 = Eigen::VectorXd::Zero(complex.num_faces());

    for (int f = 0; f < complex.num_faces(); ++f) {
        const auto& tri = complex.faces()[static_cast<std::size_t>(f)];
        const auto len = mesh.side_lengths(tri);
        const double area = heron_area(len[0], len[1], len[2]);
        if (!(area > 0.0)) {
            throw MeshQualityError("face " + std::to_string(f) + " has zero intrinsic area");
        }
        w.star2[f] = 1.0 / area;

        std::array<double, 3> cot{};
        std::array<double, 3> sq{};
        for (std::size_t c = 0; c < 3; ++c) sq[c] = len[c] * len[c];
        for (std::size_t c = 0; c < 3; ++c) {
            cot[c] = (sq[(c + 1) % 3] + sq[(c + 2) % 3] - sq[c]) / (4.0 * area);
        }

        // Edge opposite corner c joins corners c+1 and c+2, which is the
        // (c+1)-th edge in the face's CCW edge list.
        const auto& fe = complex.face_edges(f);
        for (std::size_t c = 0; c < 3; ++c) {
            w.star1[fe[(c + 1) % 3].index] += 0.5 * cot[c];
        }

        int obtuse = -1;
        for (int c = 0; c < 3; ++c) {
            if (cot[static_cast<std::size_t>(c)] < 0.0) obtuse = c;
        }
        for (std::size_t c = 0; c < 3; ++c) {
            double part;
            if (obtuse < 0) {
                part = (cot[(c + 1) % 3] * sq[(c + 1) % 3] + cot[(c + 2) % 3] * sq[(c + 2) % 3]) / 8.0;
            } else {
                part = static_cast<int>(c) == obtuse ? 0.5 * area : 0.25 * area;
            }
            w.star0[tri[c]] += part;
        }
        if (obtuse >= 0) ++w.obtuse_clamps;
    }

    for (int e = 0; e < complex.num_edges(); ++e) {
        if (!(w.star1[e] > 0.0)) {
            const auto [i, j] = complex.edges()[static_cast<std::size_t>(e)];
            throw MeshQualityError(
                "edge (" + std::to_string(i) + "," + std::to_string(j) +
                ") has non-positive cotangent weight " + std::to_string(w.star1[e]));
        }
    }
    for (int v = 0; v < complex.num_vertices(); ++v) {
        if (!(w.star0[v] > 0.0)) {
            throw MeshQualityError("vertex " + std::to_string(v) + " has non-positive dual area");
        }
    }
    return w;
}

/// Discrete codifferential delta_k = Star_{k-1}^{-1} d_{k-1}^T Star_k, the
/// exact adjoint of d under the diagonal L2 pairing. On a surface the smooth
/// counterpart is d* = (-1)^{Nk+N+1} * d * = - * d * for 1-forms.
inline Cochain codifferential(const Cochain& c, const SimplicialComplex& complex, const StarWeights& stars)
{
    require_matches(c, complex);
    switch (c.degree) {
    case 1:
        return {0, (complex.d0().transpose() * stars.star1.cwiseProduct(c.values)).cwiseQuotient(stars.star0)};
    case 2:
        return {1, (complex.d1().transpose() * stars.star2.cwiseProduct(c.values)).cwiseQuotient(stars.star1)};
    default:
        throw DegreeError("codifferential of a 0-cochain: there are no (-1)-forms");
    }
}

/// Sign of the smooth codifferential d* = sign * star d star on k-forms in
/// dimension n.
constexpr int codifferential_sign(int n, int k)
{
    return ((n * k + n + 1) % 2 == 0) ? 1 : -1;
}

enum class Space { L2, H1 };

/// Inner product on k-cochains. For H1, c = a^2 k (N - k) with N = 2, the
/// curvature constant that turns the Bochner Laplacian into the Hodge one.
struct InnerProductSpace {
    Space kind = Space::L2;
    int degree = 1;
    double c = 0.0;

    static InnerProductSpace make(Space kind, int degree, Curvature k)
    {
        if (degree < 0 || degree > 2) throw DegreeError("inner product degree must be 0, 1 or 2");
        return {kind, degree, k.a * k.a * degree * (2 - degree)};
    }
};

inline const char* to_string(Space s)
{
    return s == Space::L2 ? "l2" : "h1";
}

inline Space parse_space(const std::string& s)
{
    if (s == "l2" || s == "L2") return Space::L2;
    if (s == "h1" || s == "H1") return Space::H1;
    throw PreconditionError("unknown inner product space '" + s + "' (expected l2 or h1)");
}

/// Weighted L2 pairing sum_s star_k[s] u[s] v[s].
inline double l2_inner(const Cochain& u, const Cochain& v, const StarWeights& stars)
{
    require_same_degree(u, v);
    return (stars.of(u.degree).array() * u.values.array() * v.values.array()).sum();
}

/// L2 pairing over interior simplices only.
inline double l2_inner_interior(
    const Cochain& u, const Cochain& v, const SimplicialComplex& complex, const StarWeights& stars)
{
    require_same_degree(u, v);
    const auto& w = stars.of(u.degree);
    const auto& flags = complex.interior(u.degree);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (flags[static_cast<std::size_t>(i)]) sum += w[i] * u.values[i] * v.values[i];
    }
    return sum;
}

/// [u, v] = (1 + c)(u, v) + (du, dv) + (delta u, delta v).
///
/// The codifferential term is summed over interior (k-1)-simplices: at
/// boundary vertices delta only sees half a dual cell, and pairing against
/// compactly supported cochains is what the weak codifferential means.
inline double inner(
    const Cochain& u,
    const Cochain& v,
    const InnerProductSpace& space,
    const SimplicialComplex& complex,
    const StarWeights& stars)
{
    require_same_degree(u, v);
    require_matches(u, complex);
    if (u.degree != space.degree) throw DegreeError("cochain degree does not match the inner product space");
    const double base = l2_inner(u, v, stars);
    if (space.kind == Space::L2) return base;

    double total = (1.0 + space.c) * base;
    if (u.degree < 2) total += l2_inner(apply_d(u, complex), apply_d(v, complex), stars);
    if (u.degree > 0) {
        total += l2_inner_interior(
            codifferential(u, complex, stars), codifferential(v, complex, stars), complex, stars);
    }
    return total;
}

inline double norm(const Cochain& u, const InnerProductSpace& space, const SimplicialComplex& complex, const StarWeights& stars)
{
    return std::sqrt(std::max(inner(u, u, space, complex, stars), 0.0));
}

namespace detail {

inline SparseMatrix diagonal(const Eigen::VectorXd& d)
{
    SparseMatrix m(d.size(), d.size());
    m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
    for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
    m.makeCompressed();
    return m;
}

} // namespace detail

/// Sparse matrices of d, delta and the stars for one (mesh, stars) pair.
struct DecOperators {
    SparseMatrix d0, d1;
    SparseMatrix delta1, delta2; ///< 1 -> 0 and 2 -> 1
    SparseMatrix star0, star1, star2;

    DecOperators(const SimplicialComplex& complex, const StarWeights& stars)
        : d0(complex.d0())
        , d1(complex.d1())
        , star0(detail::diagonal(stars.star0))
        , star1(detail::diagonal(stars.star1))
        , star2(detail::diagonal(stars.star2))
    {
        delta1 = detail::diagonal(stars.star0.cwiseInverse()) * SparseMatrix(d0.transpose()) * star1;
        delta2 = detail::diagonal(stars.star1.cwiseInverse()) * SparseMatrix(d1.transpose()) * star2;
    }
};

/// Matrix of the inner product on degree-k cochains, so that
/// inner(u, v) = u^T M v.
inline SparseMatrix gram_matrix(
    const InnerProductSpace& space, const SimplicialComplex& complex, const DecOperators& ops)
{
    const int k = space.degree;
    const SparseMatrix& star = k == 0 ? ops.star0 : (k == 1 ? ops.star1 : ops.star2);
    if (space.kind == Space::L2) return star;

    SparseMatrix m = (1.0 + space.c) * star;
    if (k == 0) m += SparseMatrix(ops.d0.transpose() * ops.star1 * ops.d0);
    if (k == 1) {
        m += SparseMatrix(ops.d1.transpose() * ops.star2 * ops.d1);
        const SparseMatrix sel = complex.interior_selector(0) * ops.star0;
        m += SparseMatrix(ops.delta1.transpose() * sel * ops.delta1);
    }
    if (k == 2) {
        const SparseMatrix sel = complex.interior_selector(1) * ops.star1;
        m += SparseMatrix(ops.delta2.transpose() * sel * ops.delta2);
    }
    m.prune(0.0);
    return m;
}

/// Hodge Laplacian d delta + delta d (the positive operator -Delta).
inline Cochain hodge_laplacian(const Cochain& c, const SimplicialComplex& complex, const StarWeights& stars)
{
    require_matches(c, complex);
    Cochain out = Cochain::zeros(c.degree, c.size());
    if (c.degree < 2) out.values += codifferential(apply_d(c, complex), complex, stars).values;
    if (c.degree > 0) out.values += apply_d(codifferential(c, complex, stars), complex).values;
    return out;
}

/// Bochner Laplacian on a space form: the Hodge Laplacian plus a^2 k (N - k).
inline Cochain bochner(
    const Cochain& c, const InnerProductSpace& space, const SimplicialComplex& complex, const StarWeights& stars)
{
    if (c.degree != space.degree) throw DegreeError("cochain degree does not match the inner product space");
    Cochain out = hodge_laplacian(c, complex, stars);
    out.values += space.c * c.values;
    return out;
}

} // namespace spaceform
