// SPDX-License-Identifier: Apache-2.0
//
// Poincare-disk model of the hyperbolic plane of curvature -a^2, with the
// Euclidean plane as the a = 0 branch. The model metric for a > 0 is
//
//     g = (2 / (a (1 - |x|^2)))^2 * delta,
//
// so geodesics through the origin are straight rays and a point at geodesic
// radius rho sits at model radius tanh(a rho / 2).
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spaceform {

struct Curvature {
    double a = 0.0;

    constexpr Curvature() = default;
    explicit Curvature(double value) : a(value)
    {
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw DomainError("curvature parameter a must be finite and >= 0");
        }
    }

    bool flat() const { return a == 0.0; }
    friend bool operator==(const Curvature&, const Curvature&) = default;
};

struct DiskPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const DiskPoint&, const DiskPoint&) = default;
};

inline void require_valid_point(const DiskPoint& p, Curvature k)
{
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite point");
    if (!k.flat() && p.x * p.x + p.y * p.y >= 1.0) {
        throw DomainError("point lies outside the open unit disk");
    }
}

/// Geodesic distance. For a > 0 uses d = (2/a) asinh(sqrt(q)) with
/// q = |p - r|^2 / ((1 - |p|^2)(1 - |r|^2)), which is the arccosh form
/// rewritten to stay accurate for nearby points.
inline double distance(const DiskPoint& p, const DiskPoint& q, Curvature k)
{
    require_valid_point(p, k);
    require_valid_point(q, k);
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    if (k.flat()) return std::hypot(dx, dy);
    const double cp = 1.0 - (p.x * p.x + p.y * p.y);
    const double cq = 1.0 - (q.x * q.x + q.y * q.y);
    const double ratio = (dx * dx + dy * dy) / (cp * cq);
    return 2.0 * std::asinh(std::sqrt(ratio)) / k.a;
}

/// Geodesic distance from the reference point (the model origin).
inline double geodesic_radius(const DiskPoint& p, Curvature k)
{
    return distance(DiskPoint{}, p, k);
}

/// Model point at geodesic polar coordinates (rho, theta) about the origin.
inline DiskPoint from_geodesic_polar(double rho, double theta, Curvature k)
{
    const double r = k.flat() ? rho : std::tanh(0.5 * k.a * rho);
    return {r * std::cos(theta), r * std::sin(theta)};
}

namespace detail {

inline void require_triangle_sides(double l1, double l2, double l3)
{
    if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) || !std::isfinite(l1 + l2 + l3)) {
        throw DomainError("triangle side lengths must be positive and finite");
    }
    const double longest = std::max({l1, l2, l3});
    const double sum = l1 + l2 + l3;
    if (2.0 * longest > sum * (1.0 + 1e-12)) {
        throw DomainError("side lengths violate the triangle inequality");
    }
}

} // namespace detail

/// Area of the Euclidean triangle with the given side lengths (Kahan's
/// ordering of Heron's formula, accurate for needle-shaped triangles).
inline double heron_area(double l1, double l2, double l3)
{
    std::array<double, 3> s{l1, l2, l3};
    std::sort(s.begin(), s.end(), std::greater<>());
    const double a = s[0], b = s[1], c = s[2];
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return 0.25 * std::sqrt(std::max(p, 0.0));
}

/// Area of the geodesic triangle with the given side lengths.
///
/// a = 0 is Heron's formula. For a > 0 the interior angles come from the
/// half-angle form of the hyperbolic law of cosines at curvature -a^2 and the
/// area is the angle defect (pi - A - B - C) / a^2.
inline double triangle_area(double l1, double l2, double l3, Curvature k)
{
    detail::require_triangle_sides(l1, l2, l3);
    if (k.flat()) return heron_area(l1, l2, l3);

    const double x1 = k.a * l1, x2 = k.a * l2, x3 = k.a * l3;
    const double s = 0.5 * (x1 + x2 + x3);
    const double sh = std::sinh(s);
    const double sh1 = std::sinh(std::max(s - x1, 0.0));
    const double sh2 = std::sinh(std::max(s - x2, 0.0));
    const double sh3 = std::sinh(std::max(s - x3, 0.0));
    auto angle = [&](double opposite, double adj1, double adj2) {
        return 2.0 * std::atan2(std::sqrt(adj1 * adj2), std::sqrt(sh * opposite));
    };
    const double defect =
        std::numbers::pi - angle(sh1, sh2, sh3) - angle(sh2, sh1, sh3) - angle(sh3, sh1, sh2);
    return std::max(defect, 0.0) / (k.a * k.a);
}

struct MeshProvenance {
    double rho_max = 0.0;
    double edge = 0.0;

    friend bool operator==(const MeshProvenance&, const MeshProvenance&) = default;
};

using Triangle = std::array<int, 3>;

/// Counterclockwise-oriented triangulated disk in model coordinates.
class TriMesh {
public:
    TriMesh() = default;

    /// Validates and stores a mesh. When provenance is present every
    /// hyperbolic edge length must lie in [h/2, 2h].
    TriMesh(
        Curvature curvature,
        std::vector<DiskPoint> vertices,
        std::vector<Triangle> triangles,
        std::optional<MeshProvenance> provenance = std::nullopt)
        : curvature_(curvature)
        , vertices_(std::move(vertices))
        , triangles_(std::move(triangles))
        , provenance_(provenance)
    {
        validate();
    }

    Curvature curvature() const { return curvature_; }
    const std::vector<DiskPoint>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::optional<MeshProvenance>& provenance() const { return provenance_; }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }

    double edge_length(int i, int j) const
    {
        return distance(vertices_[static_cast<std::size_t>(i)], vertices_[static_cast<std::size_t>(j)], curvature_);
    }

    /// Hyperbolic (or Euclidean) side lengths opposite each corner:
    /// result[c] is the length of the side not touching corner c.
    std::array<double, 3> side_lengths(const Triangle& t) const
    {
        return {edge_length(t[1], t[2]), edge_length(t[2], t[0]), edge_length(t[0], t[1])};
    }

    double geodesic_triangle_area(std::size_t f) const
    {
        const auto l = side_lengths(triangles_[f]);
        return triangle_area(l[0], l[1], l[2], curvature_);
    }

    double total_area() const
    {
        double sum = 0.0;
        for (std::size_t f = 0; f < triangles_.size(); ++f) sum += geodesic_triangle_area(f);
        return sum;
    }

    /// 64-bit FNV-1a over curvature, coordinates and connectivity.
    std::string checksum() const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix_bytes = [&h](const void* data, std::size_t n) {
            const auto* bytes = static_cast<const unsigned char*>(data);
            for (std::size_t i = 0; i < n; ++i) {
                h ^= bytes[i];
                h *= 0x100000001b3ULL;
            }
        };
        auto mix_double = [&](double v) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            mix_bytes(&bits, sizeof bits);
        };
        mix_double(curvature_.a);
        for (const auto& p : vertices_) {
            mix_double(p.x);
            mix_double(p.y);
        }
        for (const auto& t : triangles_) {
            for (int v : t) {
                const auto w = static_cast<std::int64_t>(v);
                mix_bytes(&w, sizeof w);
            }
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    void validate() const
    {
        const auto nv = static_cast<int>(vertices_.size());
        if (triangles_.empty()) throw TopologyError("mesh has no triangles");
        for (const auto& p : vertices_) require_valid_point(p, curvature_);

        std::map<std::pair<int, int>, int> edge_count;
        std::vector<bool> used(vertices_.size(), false);
        for (const auto& t : triangles_) {
            for (int v : t) {
                if (v < 0 || v >= nv) throw TopologyError("triangle references a missing vertex");
                used[static_cast<std::size_t>(v)] = true;
            }
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
                throw TopologyError("triangle repeats a vertex");
            }
            const auto& p = vertices_[static_cast<std::size_t>(t[0])];
            const auto& q = vertices_[static_cast<std::size_t>(t[1])];
            const auto& r = vertices_[static_cast<std::size_t>(t[2])];
            const double orient = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
            if (!(orient > 0.0)) throw TopologyError("triangle is not counterclockwise");
            for (int c = 0; c < 3; ++c) {
                const int i = t[static_cast<std::size_t>(c)];
                const int j = t[static_cast<std::size_t>((c + 1) % 3)];
                ++edge_count[{std::min(i, j), std::max(i, j)}];
            }
        }
        if (std::find(used.begin(), used.end(), false) != used.end()) {
            throw TopologyError("mesh has an isolated vertex");
        }
        const long euler = static_cast<long>(nv) - static_cast<long>(edge_count.size()) +
                           static_cast<long>(triangles_.size());
        if (euler != 1) {
            throw TopologyError("mesh is not a disk: Euler characteristic " + std::to_string(euler));
        }

        if (provenance_) {
            const double h = provenance_->edge;
            for (const auto& [e, count] : edge_count) {
                const double len = edge_length(e.first, e.second);
                if (len < 0.5 * h || len > 2.0 * h) {
                    throw ConfigurationError(
                        "edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                        ") has length " + std::to_string(len) + " outside [h/2, 2h]");
                }
            }
        }
    }

    Curvature curvature_;
    std::vector<DiskPoint> vertices_;
    std::vector<Triangle> triangles_;
    std::optional<MeshProvenance> provenance_;
};

/// Vertex count of ring i (i >= 1) at geodesic spacing dr.
inline int ring_vertex_count(int i, double dr, Curvature k)
{
    const double circumference = k.flat() ? 2.0 * std::numbers::pi * i * dr
                                          : 2.0 * std::numbers::pi * std::sinh(k.a * i * dr) / k.a;
    return static_cast<int>(std::lround(circumference / dr));
}

namespace detail {

/// Cotangent of the angle at p in the Euclidean triangle with the geodesic
/// side lengths of pqr.
inline double intrinsic_cot(const DiskPoint& p, const DiskPoint& q, const DiskPoint& r, Curvature k)
{
    const double a = distance(q, r, k);
    const double b = distance(p, r, k);
    const double c = distance(p, q, k);
    const double area = heron_area(a, b, c);
    if (!(area > 0.0)) return -std::numeric_limits<double>::infinity();
    return (b * b + c * c - a * a) / (4.0 * area);
}

struct RingBand {
    std::vector<Triangle> triangles; // inner ids, outer ids
    std::vector<double> outer_cot;   // cot opposite outer edge (j, j+1), by outer position
    double quality = -std::numeric_limits<double>::infinity();
};

/// Stitches one annulus, always closing with the shorter candidate diagonal,
/// and scores it by the smallest cotangent weight it creates or completes.
inline RingBand stitch_band(
    const std::vector<int>& inner_ids,
    const std::vector<double>& inner_angles,
    const std::vector<double>& inner_cot,
    const std::vector<int>& ids,
    const std::vector<double>& angles,
    const std::vector<DiskPoint>& vertices,
    Curvature k)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto m = static_cast<int>(inner_ids.size());
    const auto n = static_cast<int>(ids.size());
    int start = 0;
    double best = two_pi;
    for (int j = 0; j < n; ++j) {
        const double diff = std::remainder(angles[static_cast<std::size_t>(j)] - inner_angles[0], two_pi);
        if (std::abs(diff) < best) {
            best = std::abs(diff);
            start = j;
        }
    }
    auto inner_at = [&](int idx) { return inner_ids[static_cast<std::size_t>(idx % m)]; };
    auto outer_pos = [&](int idx) { return (start + idx) % n; };
    auto outer_at = [&](int idx) { return ids[static_cast<std::size_t>(outer_pos(idx))]; };
    auto point = [&](int id) -> const DiskPoint& { return vertices[static_cast<std::size_t>(id)]; };

    RingBand band;
    band.outer_cot.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<double> inner_band_cot(static_cast<std::size_t>(m), 0.0);
    double quality = std::numeric_limits<double>::infinity();
    double pending = 0.0; // cot opposite the last diagonal, from the previous triangle
    bool have_pending = false;

    int i = 0, j = 0;
    while (i < m || j < n) {
        bool advance_outer = j < n;
        if (i < m && j < n) {
            advance_outer = distance(point(inner_at(i)), point(outer_at(j + 1)), k) <=
                            distance(point(inner_at(i + 1)), point(outer_at(j)), k);
        }
        Triangle t;
        double enter, leave;
        if (advance_outer) {
            t = {inner_at(i), outer_at(j), outer_at(j + 1)};
            // enters through (i, j), leaves through (i, j+1)
            enter = intrinsic_cot(point(t[2]), point(t[0]), point(t[1]), k);
            leave = intrinsic_cot(point(t[1]), point(t[0]), point(t[2]), k);
            band.outer_cot[static_cast<std::size_t>(outer_pos(j))] = intrinsic_cot(point(t[0]), point(t[1]), point(t[2]), k);
            ++j;
        } else {
            t = {inner_at(i), outer_at(j), inner_at(i + 1)};
            // enters through (i, j), leaves through (i+1, j)
            enter = intrinsic_cot(point(t[2]), point(t[0]), point(t[1]), k);
            leave = intrinsic_cot(point(t[0]), point(t[1]), point(t[2]), k);
            inner_band_cot[static_cast<std::size_t>(i)] = intrinsic_cot(point(t[1]), point(t[0]), point(t[2]), k);
            ++i;
        }
        if (have_pending) quality = std::min(quality, pending + enter);
        pending = leave;
        have_pending = true;
        band.triangles.push_back(t);
    }
    // The last triangle leaves through the first one's entry diagonal.
    const Triangle& first = band.triangles.front();
    quality = std::min(quality, pending + intrinsic_cot(point(first[2]), point(first[0]), point(first[1]), k));
    for (int idx = 0; idx < m; ++idx) {
        const auto u = static_cast<std::size_t>(idx);
        quality = std::min(quality, inner_cot[u] + inner_band_cot[u]);
    }
    band.quality = 0.5 * quality;
    return band;
}

} // namespace detail

/// Triangulated geodesic ball of radius rho_max about the origin.
///
/// Concentric rings at geodesic radii i * dr, dr = rho_max / round(rho_max / h),
/// ring i holding round(2 pi sinh(a i dr) / (a dr)) vertices (2 pi i at
/// a = 0). The center is fanned to ring 1. Each later ring is stitched to
/// the one inside it with shortest diagonals, its rotation picked from a
/// fixed set of candidates to keep the smallest cotangent weight away from 0.
inline TriMesh ball_mesh(Curvature k, double rho_max, double h)
{
    if (!(rho_max > 0.0) || !(h > 0.0) || !std::isfinite(rho_max) || !std::isfinite(h)) {
        throw ConfigurationError("ball_mesh requires rho_max > 0 and h > 0");
    }
    if (h > rho_max * (1.0 + 1e-12)) {
        throw ConfigurationError("ball_mesh requires h <= rho_max");
    }
    const int rings = std::max(1, static_cast<int>(std::lround(rho_max / h)));
    const double dr = rho_max / rings;
    if (ring_vertex_count(rings, dr, k) < 3) {
        throw ConfigurationError("parameters yield fewer than 3 boundary vertices");
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr int candidates = 24;

    std::vector<DiskPoint> vertices{DiskPoint{}};
    std::vector<Triangle> triangles;
    std::vector<double> inner_angles{0.0};
    std::vector<int> inner_ids{0};
    std::vector<double> inner_cot; // cot opposite each inner ring edge (i, i+1), from the band inside it

    for (int ring = 1; ring <= rings; ++ring) {
        const int n = ring_vertex_count(ring, dr, k);
        if (n < 3) throw ConfigurationError("ring with fewer than 3 vertices");
        const auto first_id = static_cast<int>(vertices.size());
        std::vector<int> ids(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) ids[static_cast<std::size_t>(j)] = first_id + j;

        auto place = [&](double offset, std::vector<double>& angles) {
            vertices.resize(static_cast<std::size_t>(first_id));
            angles.resize(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                angles[static_cast<std::size_t>(j)] = two_pi * (j + offset) / n;
                vertices.push_back(from_geodesic_polar(ring * dr, angles[static_cast<std::size_t>(j)], k));
            }
        };

        std::vector<double> angles;
        if (ring == 1) {
            place(0.0, angles);
            inner_cot.assign(static_cast<std::size_t>(n), 0.0);
            for (int j = 0; j < n; ++j) {
                const Triangle t{0, ids[static_cast<std::size_t>(j)], ids[static_cast<std::size_t>((j + 1) % n)]};
                triangles.push_back(t);
                inner_cot[static_cast<std::size_t>(j)] = detail::intrinsic_cot(
                    vertices[0], vertices[static_cast<std::size_t>(t[1])], vertices[static_cast<std::size_t>(t[2])], k);
            }
        } else {
            double best_offset = 0.0;
            double best_quality = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < candidates; ++c) {
                const double offset = static_cast<double>(c) / candidates;
                place(offset, angles);
                const auto band =
                    detail::stitch_band(inner_ids, inner_angles, inner_cot, ids, angles, vertices, k);
                if (band.quality > best_quality) {
                    best_quality = band.quality;
                    best_offset = offset;
                }
            }
            place(best_offset, angles);
            auto band = detail::stitch_band(inner_ids, inner_angles, inner_cot, ids, angles, vertices, k);
            triangles.insert(triangles.end(), band.triangles.begin(), band.triangles.end());
            inner_cot = std::move(band.outer_cot);
        }
        inner_angles = std::move(angles);
        inner_ids = std::move(ids);
    }
    return TriMesh(k, std::move(vertices), std::move(triangles), MeshProvenance{rho_max, h});
}

/// Smooth step profile: 1 on [0, 1], 1 - 3s^2 + 2s^3 (s = t - 1) on (1, 2),
/// 0 from 2 on. Its slope never exceeds 1.5.
inline double cutoff_profile(double t)
{
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double s = t - 1.0;
    return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

/// Vertex values phi(rho(v) / R) of the cutoff that is 1 on B(R) and 0 off B(2R).
inline Cochain cutoff_cochain(const TriMesh& mesh, double radius)
{
    if (!(radius > 1.0)) throw DomainError("cutoff radius must exceed 1");
    Eigen::VectorXd values(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        values[static_cast<Eigen::Index>(v)] =
            cutoff_profile(geodesic_radius(mesh.vertices()[v], mesh.curvature()) / radius);
    }
    return {0, std::move(values)};
}

/// Largest |phi_R(v1) - phi_R(v2)| / length over the mesh edges.
inline double max_cutoff_slope(const TriMesh& mesh, double radius)
{
    const Cochain phi = cutoff_cochain(mesh, radius);
    double best = 0.0;
    for (const auto& t : mesh.triangles()) {
        for (int c = 0; c < 3; ++c) {
            const int i = t[static_cast<std::size_t>(c)];
            const int j = t[static_cast<std::size_t>((c + 1) % 3)];
            best = std::max(best, std::abs(phi.values[i] - phi.values[j]) / mesh.edge_length(i, j));
        }
    }
    return best;
}

} // namespace spaceform
