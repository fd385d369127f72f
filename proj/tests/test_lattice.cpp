#include <doctest.h>

#include <set>
#include <stdexcept>

#include "fpp/lattice.hpp"

using namespace fpp;

namespace {

Coords c2(int x, int y) {
    Coords c{};
    c[0] = x;
    c[1] = y;
    return c;
}

EdgeRef edge2(int x, int y, int axis) {
    EdgeRef e;
    e.dim = 2;
    e.axis = axis;
    e.lower = c2(x, y);
    return e;
}

}  // namespace

TEST_CASE("box counts") {
    const LatticeBox b(2, 1);
    CHECK(b.vertex_count() == 9);
    CHECK(b.edge_count() == 12);
    const LatticeBox b3(3, 2);
    CHECK(b3.vertex_count() == 125);
    CHECK(b3.edge_count() == 3 * 4 * 25);
    CHECK_THROWS(LatticeBox(1, 1));
    CHECK_THROWS(LatticeBox(2, 0));
}

TEST_CASE("vertex encoding follows row-major shifted coordinates") {
    const LatticeBox b(2, 1);
    CHECK(b.encode_vertex(c2(-1, -1)) == 0);
    CHECK(b.encode_vertex(c2(1, 1)) == 8);
    CHECK(b.encode_vertex(c2(0, 0)) == 4);
    CHECK_THROWS_AS(b.encode_vertex(c2(2, 0)), std::out_of_range);
}

TEST_CASE("vertex and edge ids round-trip on boxes up to m=4") {
    for (int d : {2, 3}) {
        for (std::int64_t m = 1; m <= 4; ++m) {
            const LatticeBox b(d, m);
            for (VertexId v = 0; v < b.vertex_count(); ++v) {
                CHECK(b.encode_vertex(b.decode_vertex(v)) == v);
            }
            std::set<std::string> seen;
            for (EdgeId e = 0; e < b.edge_count(); ++e) {
                const EdgeRef ref = b.decode_edge(e);
                CHECK(b.encode_edge(ref) == e);
                CHECK(b.contains(ref));
                seen.insert(ref.to_string());
            }
            CHECK(static_cast<std::int64_t>(seen.size()) == b.edge_count());
        }
    }
}

TEST_CASE("axis edges") {
    const LatticeBox b(2, 4);
    const EdgeRef f1 = axis_edge(1, b);
    CHECK(f1.lower == c2(0, 0));
    CHECK(f1.axis == 0);
    CHECK(f1.upper() == c2(1, 0));
    const EdgeRef f3 = axis_edge(3, b);
    CHECK(f3.lower == c2(2, 0));
    CHECK(f3.upper() == c2(3, 0));
    CHECK_THROWS_AS(axis_edge(0, b), std::out_of_range);
    CHECK_THROWS_AS(axis_edge(5, b), std::out_of_range);
}

TEST_CASE("path validation") {
    const std::vector<EdgeRef> line = {edge2(0, 0, 0), edge2(1, 0, 0)};
    CHECK(validate_path(line).empty());

    // disconnected
    CHECK(!validate_path({edge2(0, 0, 0), edge2(2, 0, 0)}).empty());
    // repeated edge
    CHECK(!validate_path({edge2(0, 0, 0), edge2(0, 0, 0)}).empty());

    // square loop revisits the start vertex
    const std::vector<EdgeRef> loop = {edge2(0, 0, 0), edge2(1, 0, 1), edge2(0, 1, 0),
                                       edge2(0, 0, 1)};
    CHECK(!validate_path(loop).empty());

    const LatticePath p(line);
    CHECK(p.length() == 2);
    CHECK(p.endpoint_a() == c2(0, 0));
    CHECK(p.endpoint_b() == c2(2, 0));
}

TEST_CASE("detour construction matches the planar template") {
    const LatticeBox b(2, 4);
    const auto paths = detour_paths(edge2(0, 0, 0), b);
    REQUIRE(paths.size() == 4);
    CHECK(paths[0].length() == 1);

    const LatticePath up = LatticePath::from_vertices({c2(0, 0), c2(0, 1), c2(1, 1), c2(1, 0)}, 2);
    const LatticePath down =
        LatticePath::from_vertices({c2(0, 0), c2(0, -1), c2(1, -1), c2(1, 0)}, 2);
    CHECK(paths[1] == up);
    CHECK(paths[2] == down);

    const LatticePath loop = LatticePath::from_vertices(
        {c2(0, 0), c2(-1, 0), c2(-1, 1), c2(-1, 2), c2(0, 2), c2(1, 2), c2(2, 2), c2(2, 1),
         c2(2, 0), c2(1, 0)},
        2);
    CHECK(paths[3] == loop);
}

TEST_CASE("detours are pairwise disjoint with the expected lengths everywhere") {
    for (int d : {2, 3}) {
        const LatticeBox b(d, 4);
        // Every edge with margin >= 2 in a small box.
        for (EdgeId id = 0; id < b.edge_count(); ++id) {
            const EdgeRef e = b.decode_edge(id);
            bool margin_ok = true;
            for (int i = 0; i < d; ++i) {
                if (std::abs(e.lower[static_cast<std::size_t>(i)]) > b.radius() - 2 ||
                    std::abs(e.upper()[static_cast<std::size_t>(i)]) > b.radius() - 2) {
                    margin_ok = false;
                }
            }
            if (!margin_ok) continue;
            const auto paths = detour_paths(e, b);
            REQUIRE(static_cast<int>(paths.size()) == 2 * d);

            std::multiset<std::size_t> lengths;
            std::set<std::pair<std::array<std::int32_t, kMaxDim>, int>> all;
            std::size_t total = 0;
            for (const auto& p : paths) {
                lengths.insert(p.length());
                CHECK(validate_path(p.edges()).empty());
                for (const auto& pe : p.edges()) {
                    all.insert({pe.lower, pe.axis});
                    ++total;
                }
            }
            std::multiset<std::size_t> want = {1, 9};
            for (int i = 0; i < 2 * d - 2; ++i) want.insert(3);
            CHECK(lengths == want);
            CHECK(all.size() == total);  // no shared edges anywhere
        }
    }
}

TEST_CASE("detour margin errors") {
    const LatticeBox b(2, 2);
    CHECK_THROWS_AS(detour_paths(edge2(1, 0, 0), b), std::invalid_argument);  // loop exits right
    const LatticeBox wide(2, 4);
    CHECK_NOTHROW(detour_paths(edge2(1, 0, 0), wide));
}

TEST_CASE("distance to boundary") {
    const LatticeBox b(2, 4);
    CHECK(b.distance_to_boundary(c2(0, 0)) == 4);
    CHECK(b.distance_to_boundary(c2(3, -1)) == 1);
    CHECK(b.distance_to_boundary(c2(4, 0)) == 0);
}
