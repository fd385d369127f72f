#pragma once

#include <optional>
#include <span>

#include "fpp/lattice.hpp"
#include "fpp/weights.hpp"

namespace fpp {

/// Relative tolerance under which two path values count as tied.
inline constexpr double kTieRelTol = 1e-12;

struct PassageQuery {
    const LatticeBox* box = nullptr;
    VertexId source = 0;
    VertexId target = 0;
    std::optional<Truncation> truncation;
    const Realization* realization = nullptr;
};

struct GeodesicResult {
    double value = 0;
    LatticePath path;
    std::size_t length = 0;
    bool certified_unbounded = false;
    bool tie_broken = false;
};

/// Minimum (optionally truncated) passage time between two box vertices,
/// with the canonical geodesic. Ties among optimal paths are resolved by
/// the greedy edge-center rule: from the source onward, among edges that
/// continue some optimal path, pick the one whose center minimizes the
/// coordinate key (c_d, ..., c_2, c_1) lexicographically.
GeodesicResult shortest_passage(const PassageQuery& q);

/// Same, over an explicit raw-weight table indexed by box edge id.
GeodesicResult shortest_passage(const LatticeBox& box, VertexId source, VertexId target,
                                std::span<const double> raw_weights,
                                const std::optional<Truncation>& truncation);

/// Value-only fast path (no canonical geodesic, early-exit search).
double shortest_passage_value(const LatticeBox& box, VertexId source, VertexId target,
                              std::span<const double> raw_weights,
                              const std::optional<Truncation>& truncation);

/// True iff `essinf > 0` and value < essinf * (graph distance from the
/// source to the box boundary), which certifies that the boxed minimum
/// equals the minimum over all finite lattice paths. False is inconclusive.
bool certify_global(const LatticeBox& box, VertexId source, double value, double essinf);

}  // namespace fpp
