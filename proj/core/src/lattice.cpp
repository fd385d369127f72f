#include "fpp/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fpp {

namespace {

std::string coords_to_string(const Coords& c, int dim) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim; ++i) {
        if (i) os << ',';
        os << c[static_cast<std::size_t>(i)];
    }
    os << ')';
    return os.str();
}

}  // namespace

bool EdgeRef::operator==(const EdgeRef& o) const {
    if (axis != o.axis || dim != o.dim) return false;
    for (int i = 0; i < dim; ++i) {
        if (lower[static_cast<std::size_t>(i)] != o.lower[static_cast<std::size_t>(i)]) return false;
    }
    return true;
}

std::string EdgeRef::to_string() const {
    std::ostringstream os;
    os << coords_to_string(lower, dim) << "-" << coords_to_string(upper(), dim);
    return os.str();
}

LatticeBox::LatticeBox(int dim, std::int64_t radius) : dim_(dim), radius_(radius) {
    if (dim < 2 || dim > kMaxDim) {
        throw std::invalid_argument("LatticeBox: dim must be in [2, " + std::to_string(kMaxDim) + "]");
    }
    if (radius < 1) {
        throw std::invalid_argument("LatticeBox: radius must be >= 1");
    }
    const std::int64_t side = 2 * radius + 1;
    std::int64_t v = 1;
    for (int i = 0; i < dim; ++i) {
        if (v > (std::int64_t{1} << 62) / side) {
            throw std::invalid_argument("LatticeBox: vertex count overflows");
        }
        v *= side;
    }
    vertex_count_ = v;
    // v / side vertices per slab times 2m slabs on each axis
    edges_per_axis_ = (v / side) * (2 * radius);
    edge_count_ = edges_per_axis_ * dim;
}

bool LatticeBox::contains(const Coords& c) const {
    for (int i = 0; i < dim_; ++i) {
        const auto x = c[static_cast<std::size_t>(i)];
        if (x < -radius_ || x > radius_) return false;
    }
    return true;
}

bool LatticeBox::contains(const EdgeRef& e) const {
    return e.dim == dim_ && e.axis >= 0 && e.axis < dim_ && contains(e.lower) && contains(e.upper());
}

VertexId LatticeBox::encode_vertex(const Coords& c) const {
    if (!contains(c)) {
        throw std::out_of_range("encode_vertex: coordinate outside box: " + coords_to_string(c, dim_));
    }
    const std::int64_t side = this->side();
    std::int64_t id = 0;
    for (int i = 0; i < dim_; ++i) {
        id = id * side + (c[static_cast<std::size_t>(i)] + radius_);
    }
    return id;
}

Coords LatticeBox::decode_vertex(VertexId id) const {
    if (id < 0 || id >= vertex_count_) {
        throw std::out_of_range("decode_vertex: id out of range");
    }
    const std::int64_t side = this->side();
    Coords c{};
    for (int i = dim_ - 1; i >= 0; --i) {
        c[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(id % side - radius_);
        id /= side;
    }
    return c;
}

EdgeId LatticeBox::encode_edge(const EdgeRef& e) const {
    if (e.dim != dim_ || e.axis < 0 || e.axis >= dim_) {
        throw std::out_of_range("encode_edge: bad axis or dimension");
    }
    if (!contains(e.lower) || !contains(e.upper())) {
        throw std::out_of_range("encode_edge: edge outside box: " + e.to_string());
    }
    const std::int64_t side = this->side();
    std::int64_t rank = 0;
    for (int i = 0; i < dim_; ++i) {
        const std::int64_t radix = (i == e.axis) ? side - 1 : side;
        rank = rank * radix + (e.lower[static_cast<std::size_t>(i)] + radius_);
    }
    return static_cast<EdgeId>(e.axis) * edges_per_axis_ + rank;
}

EdgeRef LatticeBox::decode_edge(EdgeId id) const {
    if (id < 0 || id >= edge_count_) {
        throw std::out_of_range("decode_edge: id out of range");
    }
    const int axis = static_cast<int>(id / edges_per_axis_);
    std::int64_t rank = id % edges_per_axis_;
    const std::int64_t side = this->side();
    EdgeRef e;
    e.dim = dim_;
    e.axis = axis;
    for (int i = dim_ - 1; i >= 0; --i) {
        const std::int64_t radix = (i == axis) ? side - 1 : side;
        e.lower[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(rank % radix - radius_);
        rank /= radix;
    }
    return e;
}

std::int64_t LatticeBox::distance_to_boundary(const Coords& c) const {
    std::int64_t maxabs = 0;
    for (int i = 0; i < dim_; ++i) {
        maxabs = std::max<std::int64_t>(maxabs, std::abs(std::int64_t{c[static_cast<std::size_t>(i)]}));
    }
    return radius_ - maxabs;
}

std::string validate_path(const std::vector<EdgeRef>& edges) {
    if (edges.empty()) return "path has no edges";
    const int dim = edges.front().dim;

    auto key = [dim](const Coords& c) {
        std::array<std::int32_t, kMaxDim> k{};
        for (int i = 0; i < dim; ++i) k[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
        return k;
    };

    // Reconstruct the vertex sequence: the first edge fixes the start so
    // that each subsequent edge shares exactly one endpoint with the walk.
    std::vector<Coords> verts;
    if (edges.size() == 1) {
        verts = {edges[0].lower, edges[0].upper()};
    } else {
        const Coords l0 = edges[0].lower, u0 = edges[0].upper();
        const Coords l1 = edges[1].lower, u1 = edges[1].upper();
        auto eq = [&](const Coords& a, const Coords& b) { return key(a) == key(b); };
        Coords start, second;
        if (eq(u0, l1) || eq(u0, u1)) {
            start = l0; second = u0;
        } else if (eq(l0, l1) || eq(l0, u1)) {
            start = u0; second = l0;
        } else {
            return "edges 0 and 1 do not share an endpoint";
        }
        verts = {start, second};
        for (std::size_t i = 1; i < edges.size(); ++i) {
            if (edges[i].dim != dim) return "mixed dimensions";
            const Coords cur = verts.back();
            const Coords l = edges[i].lower, u = edges[i].upper();
            if (eq(l, cur)) {
                verts.push_back(u);
            } else if (eq(u, cur)) {
                verts.push_back(l);
            } else {
                return "edge " + std::to_string(i) + " does not continue the walk";
            }
        }
    }

    std::set<std::array<std::int32_t, kMaxDim>> seen;
    for (const auto& v : verts) {
        if (!seen.insert(key(v)).second) return "repeated vertex (not self-avoiding)";
    }
    std::set<std::pair<std::array<std::int32_t, kMaxDim>, int>> edge_seen;
    for (const auto& e : edges) {
        if (!edge_seen.insert({key(e.lower), e.axis}).second) return "repeated edge";
    }
    return {};
}

LatticePath::LatticePath(std::vector<EdgeRef> edges) : edges_(std::move(edges)) {
    const std::string err = validate_path(edges_);
    if (!err.empty()) throw std::invalid_argument("LatticePath: " + err);
    const int dim = edges_.front().dim;
    // validate_path accepted, so the vertex walk below is well defined
    vertices_.clear();
    auto eq = [dim](const Coords& a, const Coords& b) {
        for (int i = 0; i < dim; ++i) {
            if (a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)]) return false;
        }
        return true;
    };
    if (edges_.size() == 1) {
        vertices_ = {edges_[0].lower, edges_[0].upper()};
    } else {
        const Coords u0 = edges_[0].upper();
        if (eq(u0, edges_[1].lower) || eq(u0, edges_[1].upper())) {
            vertices_ = {edges_[0].lower, u0};
        } else {
            vertices_ = {u0, edges_[0].lower};
        }
        for (std::size_t i = 1; i < edges_.size(); ++i) {
            const Coords cur = vertices_.back();
            vertices_.push_back(eq(edges_[i].lower, cur) ? edges_[i].upper() : edges_[i].lower);
        }
    }
    a_ = vertices_.front();
    b_ = vertices_.back();
}

LatticePath LatticePath::from_vertices(const std::vector<Coords>& vertices, int dim) {
    if (vertices.size() < 2) throw std::invalid_argument("from_vertices: need at least two vertices");
    std::vector<EdgeRef> edges;
    edges.reserve(vertices.size() - 1);
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        const Coords& a = vertices[i];
        const Coords& b = vertices[i + 1];
        int axis = -1;
        int delta = 0;
        for (int j = 0; j < dim; ++j) {
            const int d = b[static_cast<std::size_t>(j)] - a[static_cast<std::size_t>(j)];
            if (d != 0) {
                if (axis != -1 || (d != 1 && d != -1)) {
                    throw std::invalid_argument("from_vertices: consecutive vertices not adjacent");
                }
                axis = j;
                delta = d;
            }
        }
        if (axis == -1) throw std::invalid_argument("from_vertices: repeated vertex");
        EdgeRef e;
        e.dim = dim;
        e.axis = axis;
        e.lower = (delta > 0) ? a : b;
        edges.push_back(e);
    }
    return LatticePath(std::move(edges));
}

Coords origin_coords(int) { return Coords{}; }

EdgeRef axis_edge(std::int64_t i, const LatticeBox& box) {
    if (i < 1) throw std::out_of_range("axis_edge: index must be >= 1");
    if (i > box.radius()) throw std::out_of_range("axis_edge: index exceeds box radius");
    EdgeRef e;
    e.dim = box.dim();
    e.axis = 0;
    e.lower = Coords{};
    e.lower[0] = static_cast<std::int32_t>(i - 1);
    return e;
}

std::vector<LatticePath> detour_paths(const EdgeRef& e, const LatticeBox& box) {
    const int d = box.dim();
    if (e.dim != d) throw std::invalid_argument("detour_paths: dimension mismatch");
    if (!box.contains(e)) throw std::invalid_argument("detour_paths: edge outside box");

    const Coords x = e.lower;
    const Coords y = e.upper();
    const int a = e.axis;

    auto shifted = [&](const Coords& base, int axis, int delta) {
        Coords c = base;
        c[static_cast<std::size_t>(axis)] += static_cast<std::int32_t>(delta);
        return c;
    };

    std::vector<LatticePath> paths;
    paths.reserve(static_cast<std::size_t>(2 * d));
    paths.emplace_back(std::vector<EdgeRef>{e});

    // Three-edge detour through each transverse direction.
    for (int t = 0; t < d; ++t) {
        if (t == a) continue;
        for (int s : {+1, -1}) {
            std::vector<Coords> verts = {x, shifted(x, t, s), shifted(y, t, s), y};
            paths.push_back(LatticePath::from_vertices(verts, d));
        }
    }

    // Nine-edge loop in the plane of the edge axis and the first transverse
    // axis; the planar template around (0,0)-(1,0) is
    // (0,0) (-1,0) (-1,1) (-1,2) (0,2) (1,2) (2,2) (2,1) (2,0) (1,0).
    const int t0 = (a == 0) ? 1 : 0;
    static constexpr int kLoop[10][2] = {{0, 0},  {-1, 0}, {-1, 1}, {-1, 2}, {0, 2},
                                         {1, 2},  {2, 2},  {2, 1},  {2, 0},  {1, 0}};
    std::vector<Coords> loop;
    loop.reserve(10);
    for (const auto& p : kLoop) {
        Coords c = x;
        c[static_cast<std::size_t>(a)] += static_cast<std::int32_t>(p[0]);
        c[static_cast<std::size_t>(t0)] += static_cast<std::int32_t>(p[1]);
        loop.push_back(c);
    }
    paths.push_back(LatticePath::from_vertices(loop, d));

    for (const auto& p : paths) {
        for (const auto& pe : p.edges()) {
            if (!box.contains(pe)) {
                throw std::invalid_argument("detour_paths: insufficient box margin around " + e.to_string());
            }
        }
    }
    return paths;
}

}  // namespace fpp
