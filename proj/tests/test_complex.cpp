// SPDX-License-Identifier: Apache-2.0
#include <spaceform/complex.hpp>
#include <spaceform/geometry.hpp>

#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

using namespace spaceform;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// Vertices on edges that border a single triangle, counted straight from the
// triangle list.
std::set<int> boundary_vertices_of(const TriMesh& mesh)
{
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.triangles()) {
        for (int c = 0; c < 3; ++c) {
            const int i = t[c], j = t[(c + 1) % 3];
            ++count[{std::min(i, j), std::max(i, j)}];
        }
    }
    std::set<int> out;
    for (const auto& [e, n] : count) {
        if (n == 1) {
            out.insert(e.first);
            out.insert(e.second);
        }
    }
    return out;
}

} // namespace

TEST_CASE("single triangle complex")
{
    const TriMesh m(Curvature(0), {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const SimplicialComplex c = build_complex(m);
    CHECK(c.num_vertices() == 3);
    CHECK(c.num_edges() == 3);
    CHECK(c.num_faces() == 1);
    const SparseMatrix dd = c.d1() * c.d0();
    CHECK(dd.norm() == 0.0);
    CHECK(c.num_boundary_edges() == 3);
    CHECK(c.num_boundary_vertices() == 3);
}

TEST_CASE("edge orientation and incidence signs")
{
    const TriMesh m(Curvature(0), {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const SimplicialComplex c(m);
    REQUIRE(c.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
    const Eigen::MatrixXd d0 = Eigen::MatrixXd(c.d0());
    Eigen::MatrixXd expect_d0(3, 3);
    expect_d0 << -1, 1, 0, -1, 0, 1, 0, -1, 1;
    CHECK(d0 == expect_d0);
    // CCW boundary 0 -> 1 -> 2 -> 0 runs along (0,1), (1,2) and against (0,2).
    const Eigen::MatrixXd d1 = Eigen::MatrixXd(c.d1());
    Eigen::MatrixXd expect_d1(1, 3);
    expect_d1 << 1, -1, 1;
    CHECK(d1 == expect_d1);
}

TEST_CASE("d1 d0 vanishes exactly on generated meshes")
{
    for (double a : {0.0, 1.0}) {
        for (double rho : {1.0, 3.0}) {
            for (double h : {0.2, 0.1}) {
                const SimplicialComplex c(ball_mesh(Curvature(a), rho, h));
                const SparseMatrix dd = c.d1() * c.d0();
                for (int j = 0; j < dd.outerSize(); ++j) {
                    for (SparseMatrix::InnerIterator it(dd, j); it; ++it) REQUIRE(it.value() == 0.0);
                }
                CHECK(c.num_vertices() - c.num_edges() + c.num_faces() == 1);
            }
        }
    }
}

TEST_CASE("boundary of a small ball is one cycle")
{
    const TriMesh m = ball_mesh(Curvature(0), 0.2, 0.1);
    const SimplicialComplex c(m);
    CHECK(c.num_boundary_edges() == c.num_boundary_vertices());
    CHECK(c.num_boundary_vertices() == ring_vertex_count(2, 0.1, Curvature(0)));
    const auto expected = boundary_vertices_of(m);
    for (int v = 0; v < c.num_vertices(); ++v) CHECK(c.is_boundary_vertex(v) == (expected.count(v) == 1));
}

TEST_CASE("interior edges see opposite orientations")
{
    const SimplicialComplex c(ball_mesh(Curvature(1), 1.0, 0.1));
    const SparseMatrix& d1 = c.d1();
    for (int e = 0; e < c.num_edges(); ++e) {
        double sum = 0.0;
        int faces = 0;
        for (SparseMatrix::InnerIterator it(d1, e); it; ++it) {
            sum += it.value();
            ++faces;
        }
        if (c.is_boundary_edge(e)) {
            CHECK(faces == 1);
        } else {
            CHECK(faces == 2);
            CHECK(sum == 0.0);
        }
    }
}

TEST_CASE("apply_d examples")
{
    const TriMesh m = ball_mesh(Curvature(0), 0.5, 0.1);
    const SimplicialComplex c(m);
    const Cochain ones(0, Eigen::VectorXd::Ones(c.num_vertices()));
    CHECK(apply_d(ones, c).values.cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(5);
    const Cochain f(0, random_vector(c.num_vertices(), rng));
    CHECK(apply_d(apply_d(f, c), c).values.cwiseAbs().maxCoeff() <= 1e-14);

    Eigen::VectorXd x(c.num_vertices());
    for (int v = 0; v < c.num_vertices(); ++v) x[v] = m.vertices()[v].x;
    const Cochain dx = apply_d(Cochain(0, x), c);
    for (int e = 0; e < c.num_edges(); ++e) {
        const auto [i, j] = c.edges()[e];
        CHECK(dx.values[e] == m.vertices()[j].x - m.vertices()[i].x);
    }

    CHECK_THROWS_AS(apply_d(Cochain::zeros(2, c.num_faces()), c), DegreeError);
    CHECK_THROWS_AS(apply_d(Cochain::zeros(1, c.num_edges() + 1), c), DegreeError);
}

TEST_CASE("apply_d is linear")
{
    const SimplicialComplex c(ball_mesh(Curvature(1), 1.0, 0.2));
    std::mt19937_64 rng(9);
    for (int k : {0, 1}) {
        const Cochain u(k, random_vector(c.count(k), rng));
        const Cochain v(k, random_vector(c.count(k), rng));
        const Cochain lhs = apply_d(2.5 * u + (-0.75) * v, c);
        const Cochain rhs = 2.5 * apply_d(u, c) + (-0.75) * apply_d(v, c);
        CHECK((lhs - rhs).values.cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("interior restriction examples")
{
    const TriMesh tri(Curvature(0), {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const SimplicialComplex single(tri);
    const Cochain ones(0, Eigen::VectorXd::Ones(3));
    CHECK(interior_restriction(ones, single).values.isZero(0.0));

    const TriMesh m = ball_mesh(Curvature(0), 0.2, 0.1);
    const SimplicialComplex c(m);
    const auto boundary = boundary_vertices_of(m);
    const Cochain faces(2, Eigen::VectorXd::Ones(c.num_faces()));
    const Cochain r = interior_restriction(faces, c);
    int kept = 0;
    for (int f = 0; f < c.num_faces(); ++f) {
        bool touches = false;
        for (int v : m.triangles()[f]) touches = touches || boundary.count(v) == 1;
        CHECK(r.values[f] == (touches ? 0.0 : 1.0));
        kept += touches ? 0 : 1;
    }
    CHECK(kept == 6); // the fan around the center

    std::mt19937_64 rng(1);
    for (int k : {0, 1, 2}) {
        const Cochain u(k, random_vector(c.count(k), rng));
        const Cochain once = interior_restriction(u, c);
        CHECK(interior_restriction(once, c).values == once.values);
    }
}

TEST_CASE("interior embeddings select interior simplices")
{
    const SimplicialComplex c(ball_mesh(Curvature(1), 1.0, 0.2));
    for (int k : {0, 1, 2}) {
        const SparseMatrix p = c.interior_embedding(k);
        const auto& flags = c.interior(k);
        CHECK(p.rows() == c.count(k));
        CHECK(p.cols() == std::count(flags.begin(), flags.end(), true));
        const Eigen::VectorXd hit = p * Eigen::VectorXd::Ones(p.cols());
        for (int i = 0; i < c.count(k); ++i) CHECK(hit[i] == (flags[i] ? 1.0 : 0.0));
    }
}

TEST_CASE("non-manifold edges are rejected")
{
    // three triangles on edge (0,1); V - E + F = 5 - 7 + 3 = 1
    const TriMesh m(
        Curvature(0), {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 0.5}}, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
    CHECK_THROWS_AS(SimplicialComplex(m), TopologyError);
}
