#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fpp {

using VertexId = std::int64_t;
using EdgeId = std::int64_t;

// Coordinates are stored inline; boxes beyond this dimension are rejected
// at construction.
inline constexpr int kMaxDim = 8;

using Coords = std::array<std::int32_t, kMaxDim>;

/// Nearest-neighbor edge, identified by its lower endpoint and axis.
/// The edge runs from `lower` to `lower + unit(axis)`.
struct EdgeRef {
    Coords lower{};
    int axis = 0;
    int dim = 0;

    Coords upper() const {
        Coords u = lower;
        u[static_cast<std::size_t>(axis)] += 1;
        return u;
    }
    bool operator==(const EdgeRef& o) const;
    std::string to_string() const;
};

/// Centered box [-m, m]^d of the integer lattice. Vertices and edges carry
/// canonical ids that are pure functions of coordinates, so they are stable
/// across runs and independent of traversal order.
///
/// Vertex ids are row-major over shifted coordinates (first coordinate most
/// significant). Edge ids are lexicographic by (axis, lower endpoint
/// row-major) and form the contiguous range [0, edge_count()).
class LatticeBox {
public:
    LatticeBox(int dim, std::int64_t radius);

    int dim() const { return dim_; }
    std::int64_t radius() const { return radius_; }
    std::int64_t side() const { return 2 * radius_ + 1; }

    std::int64_t vertex_count() const { return vertex_count_; }
    std::int64_t edge_count() const { return edge_count_; }
    std::int64_t edges_per_axis() const { return edges_per_axis_; }

    bool contains(const Coords& c) const;
    bool contains(const EdgeRef& e) const;

    VertexId encode_vertex(const Coords& c) const;
    Coords decode_vertex(VertexId id) const;

    EdgeId encode_edge(const EdgeRef& e) const;
    EdgeRef decode_edge(EdgeId id) const;

    /// Graph distance from `c` to the nearest vertex on the box boundary
    /// (the set with max-norm equal to the radius).
    std::int64_t distance_to_boundary(const Coords& c) const;

private:
    int dim_;
    std::int64_t radius_;
    std::int64_t vertex_count_;
    std::int64_t edge_count_;
    std::int64_t edges_per_axis_;
};

/// Self-avoiding lattice path as an ordered edge list. `a` and `b` are the
/// endpoints derived at construction; construction validates adjacency,
/// edge distinctness and vertex distinctness.
class LatticePath {
public:
    LatticePath() = default;
    explicit LatticePath(std::vector<EdgeRef> edges);

    /// Builds the path from its vertex sequence.
    static LatticePath from_vertices(const std::vector<Coords>& vertices, int dim);

    const std::vector<EdgeRef>& edges() const { return edges_; }
    std::size_t length() const { return edges_.size(); }
    const Coords& endpoint_a() const { return a_; }
    const Coords& endpoint_b() const { return b_; }
    const std::vector<Coords>& vertices() const { return vertices_; }

    bool operator==(const LatticePath& o) const { return edges_ == o.edges_; }

private:
    std::vector<EdgeRef> edges_;
    std::vector<Coords> vertices_;  // v0..vt in path order
    Coords a_{};
    Coords b_{};
};

/// Validates the self-avoiding path contract without constructing; returns
/// an empty string on success, else a description of the violation.
std::string validate_path(const std::vector<EdgeRef>& edges);

Coords origin_coords(int dim);

/// The i-th axis edge f_i from (i-1, 0, ..., 0) to (i, 0, ..., 0); i >= 1.
EdgeRef axis_edge(std::int64_t i, const LatticeBox& box);

/// 2d pairwise edge-disjoint paths joining the endpoints of `e`: the edge
/// itself, a three-edge detour in each transverse direction, and one
/// nine-edge loop. All paths must fit inside `box` (margin of at least 2
/// around the edge); otherwise throws.
std::vector<LatticePath> detour_paths(const EdgeRef& e, const LatticeBox& box);

}  // namespace fpp
