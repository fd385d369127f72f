#include "fpp/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HeapEntry {
    double dist;
    VertexId vertex;
    bool operator>(const HeapEntry& o) const {
        if (dist != o.dist) return dist > o.dist;
        return vertex > o.vertex;  // deterministic pop order on equal keys
    }
};

double tie_tolerance(double opt) { return kTieRelTol * std::max(1.0, std::abs(opt)); }

// Label-setting search over the implicit box graph. Stops once every
// remaining label exceeds the settled stop-vertex label plus the tie
// tolerance, so all vertices on (near-)optimal root-to-stop paths end up
// settled while the rest of the box stays at infinity.
void dijkstra(const LatticeBox& box, VertexId root, VertexId stop_vertex,
              std::span<const double> w, double trunc_threshold, std::vector<double>& dist) {
    const std::int64_t nv = box.vertex_count();
    dist.assign(static_cast<std::size_t>(nv), kInf);
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
    dist[static_cast<std::size_t>(root)] = 0;
    heap.push({0.0, root});
    const int d = box.dim();
    while (!heap.empty()) {
        const HeapEntry top = heap.top();
        heap.pop();
        if (top.dist > dist[static_cast<std::size_t>(top.vertex)]) continue;
        const double stop_label = dist[static_cast<std::size_t>(stop_vertex)];
        if (top.dist > stop_label + tie_tolerance(stop_label)) break;
        const Coords c = box.decode_vertex(top.vertex);
        for (int axis = 0; axis < d; ++axis) {
            for (int dir : {+1, -1}) {
                Coords nc = c;
                nc[static_cast<std::size_t>(axis)] += dir;
                if (nc[static_cast<std::size_t>(axis)] < -box.radius() ||
                    nc[static_cast<std::size_t>(axis)] > box.radius()) {
                    continue;
                }
                EdgeRef e;
                e.dim = d;
                e.axis = axis;
                e.lower = (dir > 0) ? c : nc;
                const EdgeId eid = box.encode_edge(e);
                double we = w[static_cast<std::size_t>(eid)];
                if (we > trunc_threshold) we = trunc_threshold;
                const double nd = top.dist + we;
                const VertexId nid = box.encode_vertex(nc);
                if (nd < dist[static_cast<std::size_t>(nid)]) {
                    dist[static_cast<std::size_t>(nid)] = nd;
                    heap.push({nd, nid});
                }
            }
        }
    }
}

}  // namespace

double shortest_passage_value(const LatticeBox& box, VertexId source, VertexId target,
                              std::span<const double> raw_weights,
                              const std::optional<Truncation>& truncation) {
    if (source == target) throw std::invalid_argument("shortest_passage: source equals target");
    if (source < 0 || source >= box.vertex_count() || target < 0 || target >= box.vertex_count()) {
        throw std::out_of_range("shortest_passage: endpoint outside box");
    }
    const double thr = truncation ? truncation->threshold() : kInf;
    std::vector<double> dist;
    dijkstra(box, source, target, raw_weights, thr, dist);
    const double v = dist[static_cast<std::size_t>(target)];
    if (!std::isfinite(v)) throw std::logic_error("shortest_passage: target unreachable");
    return v;
}

GeodesicResult shortest_passage(const LatticeBox& box, VertexId source, VertexId target,
                                std::span<const double> raw_weights,
                                const std::optional<Truncation>& truncation) {
    if (source == target) throw std::invalid_argument("shortest_passage: source equals target");
    if (source < 0 || source >= box.vertex_count() || target < 0 || target >= box.vertex_count()) {
        throw std::out_of_range("shortest_passage: endpoint outside box");
    }
    const double thr = truncation ? truncation->threshold() : kInf;
    const int d = box.dim();

    std::vector<double> dist_src, dist_tgt;
    dijkstra(box, source, target, raw_weights, thr, dist_src);
    const double opt = dist_src[static_cast<std::size_t>(target)];
    if (!std::isfinite(opt)) throw std::logic_error("shortest_passage: target unreachable");
    const double tol = tie_tolerance(opt);
    dijkstra(box, target, source, raw_weights, thr, dist_tgt);

    // Greedy walk over the geodesic DAG.
    GeodesicResult res;
    res.value = opt;
    std::vector<Coords> walk;
    std::vector<char> visited(static_cast<std::size_t>(box.vertex_count()), 0);
    VertexId cur = source;
    walk.push_back(box.decode_vertex(cur));
    visited[static_cast<std::size_t>(cur)] = 1;
    while (cur != target) {
        const Coords c = box.decode_vertex(cur);
        bool found = false;
        Coords best_next{};
        VertexId best_id = -1;
        std::array<double, kMaxDim> best_key{};
        int candidates = 0;
        for (int axis = 0; axis < d; ++axis) {
            for (int dir : {+1, -1}) {
                Coords nc = c;
                nc[static_cast<std::size_t>(axis)] += dir;
                if (nc[static_cast<std::size_t>(axis)] < -box.radius() ||
                    nc[static_cast<std::size_t>(axis)] > box.radius()) {
                    continue;
                }
                const VertexId nid = box.encode_vertex(nc);
                if (visited[static_cast<std::size_t>(nid)]) continue;
                EdgeRef e;
                e.dim = d;
                e.axis = axis;
                e.lower = (dir > 0) ? c : nc;
                double we = raw_weights[static_cast<std::size_t>(box.encode_edge(e))];
                if (we > thr) we = thr;
                const double through =
                    dist_src[static_cast<std::size_t>(cur)] + we + dist_tgt[static_cast<std::size_t>(nid)];
                if (!(std::abs(through - opt) <= tol)) continue;
                ++candidates;
                // Edge-center key (c_d, ..., c_1): least significant first
                // coordinate, compared from the last coordinate down.
                std::array<double, kMaxDim> key{};
                for (int i = 0; i < d; ++i) {
                    key[static_cast<std::size_t>(i)] =
                        e.lower[static_cast<std::size_t>(i)] + (i == axis ? 0.5 : 0.0);
                }
                bool better = !found;
                if (found) {
                    for (int i = d - 1; i >= 0; --i) {
                        const double a = key[static_cast<std::size_t>(i)];
                        const double b = best_key[static_cast<std::size_t>(i)];
                        if (a != b) {
                            better = a < b;
                            break;
                        }
                    }
                }
                if (better) {
                    found = true;
                    best_key = key;
                    best_next = nc;
                    best_id = nid;
                }
            }
        }
        if (!found) {
            throw std::logic_error("shortest_passage: geodesic walk dead-ended (tolerance too tight)");
        }
        if (candidates > 1) res.tie_broken = true;
        walk.push_back(best_next);
        visited[static_cast<std::size_t>(best_id)] = 1;
        cur = best_id;
    }
    res.path = LatticePath::from_vertices(walk, d);
    res.length = res.path.length();
    return res;
}

GeodesicResult shortest_passage(const PassageQuery& q) {
    if (!q.box || !q.realization) throw std::invalid_argument("shortest_passage: incomplete query");
    const std::vector<double> w = q.realization->materialize(*q.box);
    GeodesicResult res = shortest_passage(*q.box, q.source, q.target, w, q.truncation);
    double essinf = std::numeric_limits<double>::infinity();
    for (const auto& spec : q.realization->model().distinct_specs()) {
        essinf = std::min(essinf, spec.essinf());
    }
    if (q.truncation) essinf = std::min(essinf, q.truncation->threshold());
    res.certified_unbounded = certify_global(*q.box, q.source, res.value, essinf);
    return res;
}

bool certify_global(const LatticeBox& box, VertexId source, double value, double essinf) {
    if (!(essinf > 0)) return false;
    const std::int64_t dist = box.distance_to_boundary(box.decode_vertex(source));
    return value < essinf * static_cast<double>(dist);
}

}  // namespace fpp
