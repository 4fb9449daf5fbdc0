#include "chnsd/mesh.hpp"

#include <doctest.h>

using namespace chnsd;

namespace {

DomainLayout default_layout() { return {}; } // [0,1]x[0,2], interface at 1, conduit on top

} // namespace

TEST_CASE("smallest conforming layered mesh") {
    const Mesh mesh = build_layered_mesh(1, 2, default_layout());
    CHECK(mesh.n_triangles() == 4);
    int conduit = 0, matrix = 0;
    for (Region r : mesh.region) (r == Region::conduit ? conduit : matrix)++;
    CHECK(conduit == 2);
    CHECK(matrix == 2);
    CHECK(mesh.interface_edges.size() == 1);
    validate_mesh(mesh);
}

TEST_CASE("counts follow 2 nx ny with nx interface edges") {
    const Mesh mesh = build_layered_mesh(4, 8, default_layout());
    CHECK(mesh.n_triangles() == 2 * 4 * 8);
    int conduit = 0;
    for (Region r : mesh.region)
        if (r == Region::conduit) conduit++;
    CHECK(conduit == 32);
    CHECK(mesh.interface_edges.size() == 4);
    CHECK(mesh.domain_area() == doctest::Approx(2.0).epsilon(1e-12));
    validate_mesh(mesh);
}

TEST_CASE("area conservation across sizes") {
    for (int n : {2, 3, 5}) {
        const Mesh mesh = build_layered_mesh(n, 2 * n, default_layout());
        CHECK(std::abs(mesh.domain_area() - 2.0) <= 1e-12 * 2.0);
        CHECK(mesh.region_area(Region::conduit) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("interface normal orientation follows the conduit position") {
    DomainLayout lay = default_layout();
    lay.conduit_position = ConduitPosition::top;
    for (const auto& e : build_layered_mesh(3, 4, lay).interface_edges) {
        CHECK(e.normal_c.x() == 0.0);
        CHECK(e.normal_c.y() == -1.0);
    }
    lay.conduit_position = ConduitPosition::bottom;
    for (const auto& e : build_layered_mesh(3, 4, lay).interface_edges) {
        CHECK(e.normal_c.x() == 0.0);
        CHECK(e.normal_c.y() == 1.0);
    }
}

TEST_CASE("off-line interface is rejected") {
    DomainLayout lay = default_layout();
    CHECK_THROWS_AS(build_layered_mesh(2, 3, lay), MeshError); // 3 rows cannot hit y = 1
    lay.y_interface = 0.3;
    CHECK_THROWS_AS(build_layered_mesh(2, 4, lay), MeshError);
    lay.y_interface = 2.5;
    CHECK_THROWS_AS((void)build_layered_mesh(2, 4, lay), MeshError); // outside the range
}

TEST_CASE("uniform refinement quadruples triangles and doubles interface edges") {
    const Mesh coarse = build_layered_mesh(1, 2, default_layout());
    const Mesh fine = refine_uniform(coarse);
    CHECK(fine.n_triangles() == 16);
    CHECK(fine.interface_edges.size() == 2);
    CHECK(fine.domain_area() == doctest::Approx(2.0).epsilon(1e-12));
    validate_mesh(fine);

    for (const auto& e : fine.interface_edges) {
        CHECK(e.normal_c.x() == 0.0);
        CHECK(e.normal_c.y() == -1.0);
    }
}

TEST_CASE("refined node count is nodes plus edges") {
    const Mesh coarse = build_layered_mesh(2, 2, DomainLayout{0, 1, 0, 1, 0.5, ConduitPosition::top});
    const Mesh fine = refine_uniform(coarse);
    CHECK(fine.n_nodes() == coarse.n_nodes() + coarse.n_edges());
    validate_mesh(fine);
}

TEST_CASE("interface nodes are shared by both regions") {
    const Mesh mesh = build_layered_mesh(3, 4, default_layout());
    for (const auto& e : mesh.interface_edges) {
        for (int node : {e.a, e.b}) {
            bool in_conduit = false, in_matrix = false;
            for (int t = 0; t < mesh.n_triangles(); ++t)
                for (int k = 0; k < 3; ++k)
                    if (mesh.triangles[t][k] == node)
                        (mesh.region[t] == Region::conduit ? in_conduit : in_matrix) = true;
            CHECK(in_conduit);
            CHECK(in_matrix);
        }
    }
}

TEST_CASE("construction is deterministic") {
    const Mesh a = build_layered_mesh(5, 6, DomainLayout{0, 2, -1, 2, 1, ConduitPosition::bottom});
    const Mesh b = build_layered_mesh(5, 6, DomainLayout{0, 2, -1, 2, 1, ConduitPosition::bottom});
    REQUIRE(a.n_nodes() == b.n_nodes());
    for (int i = 0; i < a.n_nodes(); ++i) {
        CHECK(a.nodes[i].x() == b.nodes[i].x());
        CHECK(a.nodes[i].y() == b.nodes[i].y());
    }
    CHECK(a.triangles == b.triangles);
}
