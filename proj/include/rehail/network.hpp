#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rehail/errors.hpp"

namespace rehail {

/// Dense node identifier, 0..n-1 after construction.
using NodeId = std::uint32_t;
using EdgeIndex = std::uint32_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Per-edge economic and physical parameters. Canonical units throughout:
/// minutes, meters, abstract currency. pickupRate is ride requests per
/// minute; speed is meters per minute.
struct EdgeParams {
    double pickupRate = 0.0;  // Q >= 0
    double rideProfit = 0.0;  // R > 0
    double travelTime = 0.0;  // T, minutes; > 0 for non-loop edges, unused for stay loops
    double speed = 0.0;       // S, meters/minute; 0 for stay loops
    double length = 0.0;      // meters
};

/// Road-segment params with length derived from speed and travel time.
inline EdgeParams makeEdgeParams(double pickupRate, double rideProfit, double travelTime,
                                 double speed) {
    return EdgeParams{pickupRate, rideProfit, travelTime, speed, speed * travelTime};
}

/// Waiting self-loop params: no motion, so speed and length are zero and the
/// travel time is not a fixed quantity (the wait duration is a decision).
inline EdgeParams makeStayParams(double pickupRate, double rideProfit) {
    return EdgeParams{pickupRate, rideProfit, 0.0, 0.0, 0.0};
}

struct RoadNode {
    NodeId id = 0;
    double lat = 0.0;
    double lon = 0.0;
    EdgeParams stay;  // the implicit (i,i) loop
};

inline RoadNode makeNode(NodeId id, double lat, double lon, double stayQ, double stayR) {
    return RoadNode{id, lat, lon, makeStayParams(stayQ, stayR)};
}

/// Directed road segment. Self-loops are never stored here; waiting lives in
/// RoadNode::stay.
struct RoadEdge {
    NodeId from = 0;
    NodeId to = 0;
    EdgeParams params;
};

/// Driver economics: wage is currency per minute, fuelCost currency per meter.
struct DriverParams {
    double wage = 0.0;
    double fuelCost = 0.0;
};

inline bool finiteNonNegative(double v) { return std::isfinite(v) && v >= 0.0; }

inline void requireFiniteDriver(const DriverParams& d) {
    if (!finiteNonNegative(d.wage) || !finiteNonNegative(d.fuelCost))
        throw NonFiniteParamsError("driver params must be finite and non-negative (wage=" +
                                   std::to_string(d.wage) + ", fuelCost=" +
                                   std::to_string(d.fuelCost) + ")");
}

// ---------------------------------------------------------------------------
// Elementary probability and value formulas
// ---------------------------------------------------------------------------

/// Probability of receiving at least one ride request within t minutes at
/// Poisson rate Q: 1 - e^(-Q t). Total on Q >= 0, t >= 0 including t = +inf.
inline double matchProbability(double pickupRate, double minutes) {
    if (pickupRate == 0.0) return 0.0;
    return -std::expm1(-pickupRate * minutes);
}

/// Expected profit of waiting at a node until matched: R - w/Q. A node with
/// zero pickup rate can never pay off, reported as -inf (reserved sentinel,
/// propagated only through max-comparisons).
inline double stayValue(const EdgeParams& stayLoop, const DriverParams& driver) {
    if (stayLoop.pickupRate == 0.0) return kNegInf;
    return stayLoop.rideProfit - driver.wage / stayLoop.pickupRate;
}

inline double stayValue(const RoadNode& node, const DriverParams& driver) {
    return stayValue(node.stay, driver);
}

/// Expected time until a match, conditional on matching within a window of t
/// minutes: phi(t) = 1/Q + t / (1 - e^(Q t)). Requires Q > 0 and t > 0;
/// t = +inf gives the unconditional exponential mean 1/Q. The value always
/// lies in (0, min(t, 1/Q)).
inline double expectedMatchTime(double pickupRate, double minutes) {
    if (std::isinf(minutes)) return 1.0 / pickupRate;
    // 1 - e^(Qt) == -expm1(Qt); written this way to survive small Q*t.
    return 1.0 / pickupRate - minutes / std::expm1(pickupRate * minutes);
}

/// Expected one-stage profit of committing to an edge for its full traversal
/// (or of a wait window of t minutes on a loop):
/// (1 - e^(-Q t)) * (R - (w + f S)/Q), with the Q = 0 limit -t (w + f S).
inline double expectedStageProfit(const EdgeParams& e, const DriverParams& driver,
                                  double minutes) {
    const double unitCost = driver.wage + driver.fuelCost * e.speed;
    if (e.pickupRate == 0.0) return -minutes * unitCost;
    return matchProbability(e.pickupRate, minutes) * (e.rideProfit - unitCost / e.pickupRate);
}

// ---------------------------------------------------------------------------
// RoadNetwork
// ---------------------------------------------------------------------------

/// Immutable directed road graph with CSR adjacency. Construction goes
/// through buildNetwork(), which validates invariants; afterwards the network
/// is safe to share across any number of readers.
class RoadNetwork {
public:
    RoadNetwork() = default;

    std::size_t nodeCount() const { return nodes_.size(); }
    std::size_t edgeCount() const { return edges_.size(); }

    const std::vector<RoadNode>& nodes() const { return nodes_; }
    const std::vector<RoadEdge>& edges() const { return edges_; }

    const RoadNode& node(NodeId id) const { return nodes_[id]; }
    const RoadEdge& edge(EdgeIndex idx) const { return edges_[idx]; }

    /// Indices of edges leaving `id`, in ascending edge-index order.
    std::span<const EdgeIndex> outgoing(NodeId id) const {
        return {adjacency_.data() + offsets_[id], offsets_[id + 1] - offsets_[id]};
    }

    friend RoadNetwork buildNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
                                    bool allowParallelEdges);

private:
    std::vector<RoadNode> nodes_;
    std::vector<RoadEdge> edges_;
    std::vector<std::size_t> offsets_;   // n+1 CSR offsets
    std::vector<EdgeIndex> adjacency_;   // edge indices grouped by tail node
};

namespace detail {

inline void validateEdgeParams(const EdgeParams& p, const std::string& where) {
    if (!(std::isfinite(p.pickupRate) && p.pickupRate >= 0.0))
        throw InvalidParamsError(where + ": pickup rate must be finite and >= 0");
    if (!(std::isfinite(p.rideProfit) && p.rideProfit > 0.0))
        throw InvalidParamsError(where + ": ride profit must be finite and > 0");
}

inline void checkWeaklyConnected(std::size_t n, const std::vector<RoadEdge>& edges) {
    if (n <= 1) return;
    std::vector<std::vector<NodeId>> undirected(n);
    for (const RoadEdge& e : edges) {
        undirected[e.from].push_back(e.to);
        undirected[e.to].push_back(e.from);
    }
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : undirected[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != n) {
        std::string sample;
        int listed = 0;
        for (NodeId v = 0; v < n && listed < 8; ++v) {
            if (!seen[v]) {
                sample += (listed ? ", " : "") + std::to_string(v);
                ++listed;
            }
        }
        throw DisconnectedGraphError("graph is not weakly connected; " +
                                     std::to_string(n - reached) +
                                     " node(s) unreachable from node 0: {" + sample + "}");
    }
}

} // namespace detail

/// Validates and freezes a network. Node ids must already be dense 0..n-1 and
/// match each node's position; edges must connect valid distinct endpoints
/// with positive travel time. Duplicate (from,to) pairs are rejected unless
/// allowParallelEdges is set (distinct physical road segments). Deterministic:
/// the same inputs produce the same adjacency ordering.
inline RoadNetwork buildNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
                                bool allowParallelEdges = false) {
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (nodes[i].id != i)
            throw InvalidParamsError("node ids must be dense and in order; position " +
                                     std::to_string(i) + " holds id " +
                                     std::to_string(nodes[i].id));
        if (!(std::isfinite(nodes[i].stay.pickupRate) && nodes[i].stay.pickupRate >= 0.0))
            throw InvalidParamsError("node " + std::to_string(i) + ": stay pickup rate invalid");
        if (!(std::isfinite(nodes[i].stay.rideProfit) && nodes[i].stay.rideProfit > 0.0))
            throw InvalidParamsError("node " + std::to_string(i) + ": stay ride profit invalid");
        nodes[i].stay.speed = 0.0;  // S_h = 0 for loops
        nodes[i].stay.length = 0.0;
    }

    std::unordered_set<std::uint64_t> pairSeen;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const RoadEdge& e = edges[k];
        const std::string where = "edge " + std::to_string(k);
        if (e.from >= n || e.to >= n)
            throw InvalidEdgeError(where + ": endpoint out of range");
        if (e.from == e.to)
            throw InvalidEdgeError(where + ": self-loop; waiting loops belong to the node");
        if (!(std::isfinite(e.params.travelTime) && e.params.travelTime > 0.0))
            throw InvalidEdgeError(where + ": travel time must be finite and > 0");
        if (!(std::isfinite(e.params.speed) && e.params.speed >= 0.0))
            throw InvalidParamsError(where + ": speed must be finite and >= 0");
        if (!(std::isfinite(e.params.length) && e.params.length >= 0.0))
            throw InvalidParamsError(where + ": length must be finite and >= 0");
        detail::validateEdgeParams(e.params, where);
        if (!allowParallelEdges) {
            const std::uint64_t key = (std::uint64_t(e.from) << 32) | e.to;
            if (!pairSeen.insert(key).second)
                throw InvalidEdgeError(where + ": duplicate (" + std::to_string(e.from) + "," +
                                       std::to_string(e.to) +
                                       "); pass allowParallelEdges for parallel roads");
        }
    }

    detail::checkWeaklyConnected(n, edges);

    RoadNetwork net;
    net.nodes_ = std::move(nodes);
    net.edges_ = std::move(edges);
    net.offsets_.assign(n + 1, 0);
    for (const RoadEdge& e : net.edges_) ++net.offsets_[e.from + 1];
    for (std::size_t i = 0; i < n; ++i) net.offsets_[i + 1] += net.offsets_[i];
    net.adjacency_.resize(net.edges_.size());
    std::vector<std::size_t> cursor(net.offsets_.begin(), net.offsets_.end() - 1);
    for (EdgeIndex k = 0; k < net.edges_.size(); ++k)
        net.adjacency_[cursor[net.edges_[k].from]++] = k;
    return net;
}

/// True when every node can reach and be reached by node 0 (follows edge
/// direction). The build always enforces weak connectivity; strong
/// connectivity is reported, not required, because the solver stays
/// well-defined either way.
inline bool isStronglyConnected(const RoadNetwork& net) {
    const std::size_t n = net.nodeCount();
    if (n <= 1) return true;
    std::vector<std::vector<NodeId>> reverse(n);
    for (const RoadEdge& e : net.edges()) reverse[e.to].push_back(e.from);

    const auto sweep = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<NodeId> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            if (forward) {
                for (EdgeIndex k : net.outgoing(v)) {
                    NodeId w = net.edge(k).to;
                    if (!seen[w]) { seen[w] = 1; ++reached; stack.push_back(w); }
                }
            } else {
                for (NodeId w : reverse[v]) {
                    if (!seen[w]) { seen[w] = 1; ++reached; stack.push_back(w); }
                }
            }
        }
        return reached == n;
    };
    return sweep(true) && sweep(false);
}

} // namespace rehail
