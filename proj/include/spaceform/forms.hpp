// SPDX-License-Identifier: Apache-2.0
//
// Built-in test 1-cochains.
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/complex.hpp>
#include <spaceform/dec.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/geometry.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace spaceform {

/// Seeded uniform draws in [-1, 1), identical on every platform
/// (std::uniform_real_distribution is implementation defined).
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

    double operator()()
    {
        const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return 2.0 * unit - 1.0;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// dx integrated exactly along every edge: x_j - x_i in model coordinates.
inline Cochain dx_form(const TriMesh& mesh, const SimplicialComplex& complex)
{
    Eigen::VectorXd x(complex.num_vertices());
    for (int v = 0; v < complex.num_vertices(); ++v) x[v] = mesh.vertices()[static_cast<std::size_t>(v)].x;
    return apply_d(Cochain(0, std::move(x)), complex);
}

/// Line integrals of the 1-form P dx + Q dy along the straight model-space
/// segment of each edge, by 3-point Gauss-Legendre quadrature.
inline Cochain integrate_form(
    const TriMesh& mesh,
    const SimplicialComplex& complex,
    const std::function<std::array<double, 2>(double, double)>& field)
{
    static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    Eigen::VectorXd values(complex.num_edges());
    for (int e = 0; e < complex.num_edges(); ++e) {
        const auto [i, j] = complex.edges()[static_cast<std::size_t>(e)];
        const DiskPoint& p = mesh.vertices()[static_cast<std::size_t>(i)];
        const DiskPoint& q = mesh.vertices()[static_cast<std::size_t>(j)];
        double sum = 0.0;
        for (std::size_t g = 0; g < 3; ++g) {
            const double t = 0.5 * (1.0 + nodes[g]);
            const auto [fx, fy] = field(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y));
            sum += 0.5 * weights[g] * (fx * (q.x - p.x) + fy * (q.y - p.y));
        }
        values[e] = sum;
    }
    return {1, std::move(values)};
}

/// (1 - r^2/s^2)^3 inside radius s, 0 outside.
inline double polynomial_bump(double x, double y, double support)
{
    const double r2 = (x * x + y * y) / (support * support);
    return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) * (1.0 - r2) : 0.0;
}

/// Smooth 1-form supported in the model disk of radius 1.3 * support about
/// the origin, with nonzero curl and divergence:
/// b(x, y) dx + 2 b(x - 0.3 support, y) dy.
inline Cochain compact_mixed_form(const TriMesh& mesh, const SimplicialComplex& complex, double support)
{
    return integrate_form(mesh, complex, [support](double x, double y) {
        return std::array<double, 2>{
            polynomial_bump(x, y, support), 2.0 * polynomial_bump(x - 0.3 * support, y, support)};
    });
}

/// Random k-cochain supported on interior simplices.
inline Cochain random_interior(int k, const SimplicialComplex& complex, UniformSource& rng)
{
    Cochain c = Cochain::zeros(k, complex.count(k));
    const auto& flags = complex.interior(k);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (flags[static_cast<std::size_t>(i)]) c.values[i] = rng();
    }
    return c;
}

/// d of a random interior 0-cochain.
inline Cochain exact_form(const SimplicialComplex& complex, UniformSource& rng)
{
    return apply_d(random_interior(0, complex, rng), complex);
}

/// delta of a random interior 2-cochain whose face densities Star2 omega are
/// uniform in [-1, 1).
inline Cochain coexact_form(const SimplicialComplex& complex, const StarWeights& stars, UniformSource& rng)
{
    Cochain density = random_interior(2, complex, rng);
    return codifferential(Cochain(2, density.values.cwiseQuotient(stars.star2)), complex, stars);
}

/// Resolves a built-in form name (dx, exact, coexact, mixed).
inline Cochain builtin_form(
    const std::string& name,
    const TriMesh& mesh,
    const SimplicialComplex& complex,
    const StarWeights& stars,
    std::uint64_t seed)
{
    UniformSource rng(seed);
    if (name == "dx") return dx_form(mesh, complex);
    if (name == "exact") return exact_form(complex, rng);
    if (name == "coexact") return coexact_form(complex, stars, rng);
    if (name == "mixed") {
        const Cochain e = exact_form(complex, rng);
        const Cochain c = coexact_form(complex, stars, rng);
        return e + c + dx_form(mesh, complex);
    }
    throw PreconditionError("unknown built-in form '" + name + "' (expected dx, exact, coexact or mixed)");
}

} // namespace spaceform
