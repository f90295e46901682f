// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <spaceform/cochain.hpp>
#include <spaceform/errors.hpp>
#include <spaceform/geometry.hpp>

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <map>
#include <utility>
#include <vector>

namespace spaceform {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Edge = std::pair<int, int>;

/// Oriented simplices of a triangulated disk and their signed incidences.
///
/// Edges are oriented low -> high vertex index and sorted lexicographically.
/// Faces keep the mesh's counterclockwise vertex order. The collar is every
/// simplex touching a boundary vertex; its complement is the interior.
class SimplicialComplex {
public:
    explicit SimplicialComplex(const TriMesh& mesh)
        : num_vertices_(static_cast<int>(mesh.num_vertices())), faces_(mesh.triangles())
    {
        std::map<Edge, int> index;
        for (const auto& t : faces_) {
            for (int c = 0; c < 3; ++c) {
                const int i = t[static_cast<std::size_t>(c)];
                const int j = t[static_cast<std::size_t>((c + 1) % 3)];
                index.emplace(Edge{std::min(i, j), std::max(i, j)}, 0);
            }
        }
        edges_.reserve(index.size());
        for (auto& [e, id] : index) {
            id = static_cast<int>(edges_.size());
            edges_.push_back(e);
        }

        const auto nv = static_cast<Eigen::Index>(num_vertices_);
        const auto ne = static_cast<Eigen::Index>(edges_.size());
        const auto nf = static_cast<Eigen::Index>(faces_.size());

        std::vector<Eigen::Triplet<double>> t0;
        t0.reserve(2 * edges_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            t0.emplace_back(static_cast<int>(e), edges_[e].first, -1.0);
            t0.emplace_back(static_cast<int>(e), edges_[e].second, 1.0);
        }
        d0_.resize(ne, nv);
        d0_.setFromTriplets(t0.begin(), t0.end());

        face_edges_.resize(faces_.size());
        edge_faces_.assign(edges_.size(), {});
        std::vector<Eigen::Triplet<double>> t1;
        t1.reserve(3 * faces_.size());
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            for (int c = 0; c < 3; ++c) {
                const int i = faces_[f][static_cast<std::size_t>(c)];
                const int j = faces_[f][static_cast<std::size_t>((c + 1) % 3)];
                const int e = index.at({std::min(i, j), std::max(i, j)});
                const int sign = i < j ? 1 : -1;
                face_edges_[f][static_cast<std::size_t>(c)] = {e, sign};
                t1.emplace_back(static_cast<int>(f), e, static_cast<double>(sign));
                auto& incident = edge_faces_[static_cast<std::size_t>(e)];
                if (incident.size() == 2) {
                    throw TopologyError(
                        "non-manifold edge (" + std::to_string(edges_[static_cast<std::size_t>(e)].first) +
                        "," + std::to_string(edges_[static_cast<std::size_t>(e)].second) + ")");
                }
                incident.push_back({static_cast<int>(f), sign});
            }
        }
        d1_.resize(nf, ne);
        d1_.setFromTriplets(t1.begin(), t1.end());

        classify_boundary();
    }

    int num_vertices() const { return num_vertices_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }

    /// Number of k-simplices.
    int count(int k) const
    {
        switch (k) {
        case 0: return num_vertices();
        case 1: return num_edges();
        case 2: return num_faces();
        default: throw DegreeError("simplex dimension must be 0, 1 or 2");
        }
    }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Triangle>& faces() const { return faces_; }

    /// Signed incidence E x V.
    const SparseMatrix& d0() const { return d0_; }
    /// Signed incidence F x E, sign +1 where the edge agrees with the CCW traversal.
    const SparseMatrix& d1() const { return d1_; }

    struct Incidence {
        int index;
        int sign;
    };

    /// The three edges of face f in CCW traversal order with their signs.
    const std::array<Incidence, 3>& face_edges(int f) const { return face_edges_[static_cast<std::size_t>(f)]; }
    /// Faces bordering edge e (one on the boundary, two inside).
    const std::vector<Incidence>& edge_faces(int e) const { return edge_faces_[static_cast<std::size_t>(e)]; }

    bool is_boundary_vertex(int v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }
    bool is_boundary_edge(int e) const { return edge_faces_[static_cast<std::size_t>(e)].size() == 1; }

    /// Interior flags per k-simplex: not touching any boundary vertex.
    const std::vector<bool>& interior(int k) const
    {
        if (k < 0 || k > 2) throw DegreeError("simplex dimension must be 0, 1 or 2");
        return interior_[static_cast<std::size_t>(k)];
    }

    int num_boundary_edges() const
    {
        return static_cast<int>(std::count_if(
            edge_faces_.begin(), edge_faces_.end(), [](const auto& inc) { return inc.size() == 1; }));
    }

    int num_boundary_vertices() const
    {
        return static_cast<int>(std::count(boundary_vertex_.begin(), boundary_vertex_.end(), true));
    }

    /// Diagonal 0/1 selector of the interior k-simplices.
    SparseMatrix interior_selector(int k) const
    {
        const auto& flags = interior(k);
        SparseMatrix s(static_cast<Eigen::Index>(flags.size()), static_cast<Eigen::Index>(flags.size()));
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (flags[i]) t.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
        }
        s.setFromTriplets(t.begin(), t.end());
        return s;
    }

    /// Columns of the identity for the interior k-simplices (count(k) x n_interior).
    SparseMatrix interior_embedding(int k) const
    {
        const auto& flags = interior(k);
        std::vector<Eigen::Triplet<double>> t;
        int col = 0;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (flags[i]) t.emplace_back(static_cast<int>(i), col++, 1.0);
        }
        SparseMatrix p(static_cast<Eigen::Index>(flags.size()), col);
        p.setFromTriplets(t.begin(), t.end());
        return p;
    }

private:
    void classify_boundary()
    {
        boundary_vertex_.assign(static_cast<std::size_t>(num_vertices_), false);
        std::vector<std::vector<int>> boundary_adj(static_cast<std::size_t>(num_vertices_));
        int boundary_edges = 0;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto& inc = edge_faces_[e];
            if (inc.size() == 2 && inc[0].sign == inc[1].sign) {
                throw TopologyError("faces sharing an edge have inconsistent orientation");
            }
            if (inc.size() == 1) {
                ++boundary_edges;
                const auto [i, j] = edges_[e];
                boundary_vertex_[static_cast<std::size_t>(i)] = true;
                boundary_vertex_[static_cast<std::size_t>(j)] = true;
                boundary_adj[static_cast<std::size_t>(i)].push_back(j);
                boundary_adj[static_cast<std::size_t>(j)].push_back(i);
            }
        }
        if (boundary_edges == 0) throw TopologyError("complex has no boundary");

        // The boundary must be one closed cycle.
        int start = -1;
        for (int v = 0; v < num_vertices_; ++v) {
            const auto deg = boundary_adj[static_cast<std::size_t>(v)].size();
            if (deg != 0 && deg != 2) throw TopologyError("boundary is not a simple cycle");
            if (deg == 2 && start < 0) start = v;
        }
        int prev = -1, cur = start, length = 0;
        do {
            const auto& nb = boundary_adj[static_cast<std::size_t>(cur)];
            const int next = nb[0] != prev ? nb[0] : nb[1];
            prev = cur;
            cur = next;
            ++length;
        } while (cur != start && length <= boundary_edges);
        if (length != boundary_edges) throw TopologyError("boundary has more than one component");

        interior_[0].resize(static_cast<std::size_t>(num_vertices_));
        for (int v = 0; v < num_vertices_; ++v) {
            interior_[0][static_cast<std::size_t>(v)] = !boundary_vertex_[static_cast<std::size_t>(v)];
        }
        interior_[1].resize(edges_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            interior_[1][e] = interior_[0][static_cast<std::size_t>(edges_[e].first)] &&
                              interior_[0][static_cast<std::size_t>(edges_[e].second)];
        }
        interior_[2].resize(faces_.size());
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            interior_[2][f] = std::all_of(faces_[f].begin(), faces_[f].end(), [this](int v) {
                return interior_[0][static_cast<std::size_t>(v)];
            });
        }
    }

    int num_vertices_;
    std::vector<Edge> edges_;
    std::vector<Triangle> faces_;
    SparseMatrix d0_;
    SparseMatrix d1_;
    std::vector<std::array<Incidence, 3>> face_edges_;
    std::vector<std::vector<Incidence>> edge_faces_;
    std::vector<bool> boundary_vertex_;
    std::array<std::vector<bool>, 3> interior_;
};

inline SimplicialComplex build_complex(const TriMesh& mesh)
{
    return SimplicialComplex(mesh);
}

inline void require_matches(const Cochain& c, const SimplicialComplex& complex)
{
    if (c.size() != complex.count(c.degree)) {
        throw DegreeError(
            "cochain of degree " + std::to_string(c.degree) + " has " + std::to_string(c.size()) +
            " values, complex has " + std::to_string(complex.count(c.degree)) + " simplices");
    }
}

/// Exterior derivative: the signed incidence product.
inline Cochain apply_d(const Cochain& c, const SimplicialComplex& complex)
{
    require_matches(c, complex);
    switch (c.degree) {
    case 0: return {1, complex.d0() * c.values};
    case 1: return {2, complex.d1() * c.values};
    default: throw DegreeError("exterior derivative of a 2-cochain on a surface");
    }
}

/// Zeroes the cochain on every collar simplex.
inline Cochain interior_restriction(const Cochain& c, const SimplicialComplex& complex)
{
    require_matches(c, complex);
    Cochain out = c;
    const auto& flags = complex.interior(c.degree);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (!flags[static_cast<std::size_t>(i)]) out.values[i] = 0.0;
    }
    return out;
}

} // namespace spaceform
