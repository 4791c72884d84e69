#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rehail/network.hpp"
#include "rehail/serialize.hpp"

namespace rehail {

/// Record of one edge split: the midpoint node that replaced the edge.
struct InsertedNode {
    NodeId newNode = 0;
    NodeId originalFrom = 0;
    NodeId originalTo = 0;
    EdgeIndex originalEdge = 0;
};

struct PreprocessReport {
    std::uint32_t splitEdges = 0;
    std::uint32_t waitZoneNodes = 0;
    std::uint32_t violationsBefore = 0;
    std::vector<InsertedNode> insertedNodes;
};

struct ValidationIssue {
    EdgeIndex edge = 0;
    NodeId from = 0;
    NodeId to = 0;
    double magnitude = 0;  // violation excess or unit relative error
};

struct ValidationReport {
    std::vector<ValidationIssue> localMaximaViolations;
    std::vector<NodeId> deadZoneNodes;        // stay loops with Q = 0
    std::vector<EdgeIndex> deadZoneEdges;     // edges with Q = 0
    std::vector<NodeId> unreachableNodes;     // strong-connectivity failures wrt node 0
    std::vector<ValidationIssue> unitAnomalies;

    bool clean() const {
        return localMaximaViolations.empty() && deadZoneNodes.empty() && deadZoneEdges.empty() &&
               unreachableNodes.empty() && unitAnomalies.empty();
    }
};

/// Expected waiting payoff a driver could extract on edge e itself, R - w/Q.
/// Q = 0 edges can never be worth waiting on and are exempt (value -inf).
inline double edgeWaitValue(const EdgeParams& e, const DriverParams& driver) {
    if (e.pickupRate == 0.0) return kNegInf;
    return e.rideProfit - driver.wage / e.pickupRate;
}

/// Indices of edges whose wait value strictly exceeds both endpoint stay
/// values, i.e. edges violating the local-maxima assumption the solver needs.
inline std::vector<EdgeIndex> scanLocalMaxima(const RoadNetwork& net, const DriverParams& driver) {
    std::vector<EdgeIndex> violations;
    for (EdgeIndex k = 0; k < net.edgeCount(); ++k) {
        const RoadEdge& e = net.edge(k);
        const double v = edgeWaitValue(e.params, driver);
        if (v == kNegInf) continue;
        const double cap =
            std::max(stayValue(net.node(e.from), driver), stayValue(net.node(e.to), driver));
        if (v > cap) violations.push_back(k);
    }
    return violations;
}

namespace detail {

/// Rebuilds a network with every edge in `toSplit` replaced by two halves
/// joined at a midpoint node whose stay loop inherits the edge's (Q, R).
/// Each half keeps Q, R and S, with half the travel time and length, so the
/// traversal total is preserved exactly. Original node ids are stable; new
/// nodes take ids n, n+1, ... in edge-index order.
inline RoadNetwork splitEdges(const RoadNetwork& net, const std::unordered_set<EdgeIndex>& toSplit,
                              std::vector<InsertedNode>* inserted) {
    std::vector<RoadNode> nodes = net.nodes();
    std::vector<RoadEdge> edges;
    edges.reserve(net.edgeCount() + toSplit.size());
    NodeId nextId = static_cast<NodeId>(nodes.size());

    for (EdgeIndex k = 0; k < net.edgeCount(); ++k) {
        const RoadEdge& e = net.edge(k);
        if (!toSplit.count(k)) {
            edges.push_back(e);
            continue;
        }
        const RoadNode& a = net.node(e.from);
        const RoadNode& b = net.node(e.to);
        RoadNode mid = makeNode(nextId, (a.lat + b.lat) / 2, (a.lon + b.lon) / 2,
                                e.params.pickupRate, e.params.rideProfit);
        EdgeParams half = e.params;
        half.travelTime = e.params.travelTime / 2;
        half.length = e.params.length / 2;
        edges.push_back(RoadEdge{e.from, mid.id, half});
        edges.push_back(RoadEdge{mid.id, e.to, half});
        nodes.push_back(mid);
        if (inserted) inserted->push_back(InsertedNode{mid.id, e.from, e.to, k});
        ++nextId;
    }
    return buildNetwork(std::move(nodes), std::move(edges), /*allowParallelEdges=*/true);
}

} // namespace detail

/// Makes the local-maxima condition hold everywhere by splitting each
/// violating edge at its geometric midpoint. The midpoint's stay loop
/// inherits the edge's (Q, R), which turns the edge's wait value into a node
/// stay value, so one pass fixes everything and the transform is idempotent.
/// Depends on the driver's wage, so it runs at solve time, not ingest time.
inline std::pair<RoadNetwork, PreprocessReport> enforceLocalMaxima(const RoadNetwork& net,
                                                                   const DriverParams& driver) {
    requireFiniteDriver(driver);
    PreprocessReport report;
    const std::vector<EdgeIndex> violations = scanLocalMaxima(net, driver);
    report.violationsBefore = static_cast<std::uint32_t>(violations.size());
    report.splitEdges = report.violationsBefore;
    if (violations.empty()) return {net, report};
    std::unordered_set<EdgeIndex> toSplit(violations.begin(), violations.end());
    RoadNetwork out = detail::splitEdges(net, toSplit, &report.insertedNodes);
    return {std::move(out), std::move(report)};
}

/// Adds a midpoint waiting node on each listed edge (curbside parking /
/// waiting zones). Same split mechanics as enforceLocalMaxima.
inline RoadNetwork insertWaitingNodes(const RoadNetwork& net,
                                      const std::vector<EdgeIndex>& waitZones,
                                      PreprocessReport* report = nullptr) {
    std::unordered_set<EdgeIndex> toSplit;
    for (EdgeIndex k : waitZones) {
        if (k >= net.edgeCount())
            throw UnknownEdgeError("wait zone index " + std::to_string(k) +
                                   " does not name a road edge (" + std::to_string(net.edgeCount()) +
                                   " edges; loops are not in the edge list)");
        toSplit.insert(k);
    }
    std::vector<InsertedNode> inserted;
    RoadNetwork out = toSplit.empty() ? net : detail::splitEdges(net, toSplit, &inserted);
    if (report) {
        report->waitZoneNodes += static_cast<std::uint32_t>(inserted.size());
        report->insertedNodes.insert(report->insertedNodes.end(), inserted.begin(), inserted.end());
    }
    return out;
}

/// Read-only inspection: local-maxima violations, dead zones (Q = 0),
/// strong-connectivity failures, and unit anomalies where S*T drifts from the
/// recorded length by more than 1e-6 relative.
inline ValidationReport validate(const RoadNetwork& net, const DriverParams& driver) {
    requireFiniteDriver(driver);
    ValidationReport report;

    for (EdgeIndex k : scanLocalMaxima(net, driver)) {
        const RoadEdge& e = net.edge(k);
        const double cap =
            std::max(stayValue(net.node(e.from), driver), stayValue(net.node(e.to), driver));
        const double excess = edgeWaitValue(e.params, driver) - (cap == kNegInf ? 0.0 : cap);
        report.localMaximaViolations.push_back(ValidationIssue{k, e.from, e.to, excess});
    }

    for (const RoadNode& nd : net.nodes())
        if (nd.stay.pickupRate == 0.0) report.deadZoneNodes.push_back(nd.id);
    for (EdgeIndex k = 0; k < net.edgeCount(); ++k)
        if (net.edge(k).params.pickupRate == 0.0) report.deadZoneEdges.push_back(k);

    if (!isStronglyConnected(net)) {
        // Nodes that fail either sweep relative to node 0.
        const std::size_t n = net.nodeCount();
        std::vector<std::vector<NodeId>> reverse(n);
        for (const RoadEdge& e : net.edges()) reverse[e.to].push_back(e.from);
        std::vector<char> fwd(n, 0), bwd(n, 0);
        const auto sweep = [&](std::vector<char>& seen, bool forward) {
            std::vector<NodeId> stack{0};
            seen[0] = 1;
            while (!stack.empty()) {
                NodeId v = stack.back();
                stack.pop_back();
                if (forward) {
                    for (EdgeIndex k : net.outgoing(v)) {
                        NodeId w = net.edge(k).to;
                        if (!seen[w]) { seen[w] = 1; stack.push_back(w); }
                    }
                } else {
                    for (NodeId w : reverse[v])
                        if (!seen[w]) { seen[w] = 1; stack.push_back(w); }
                }
            }
        };
        sweep(fwd, true);
        sweep(bwd, false);
        for (NodeId v = 0; v < n; ++v)
            if (!fwd[v] || !bwd[v]) report.unreachableNodes.push_back(v);
    }

    for (EdgeIndex k = 0; k < net.edgeCount(); ++k) {
        const EdgeParams& p = net.edge(k).params;
        const double expected = p.speed * p.travelTime;
        const double scale = std::max(std::abs(expected), std::abs(p.length));
        if (scale > 0 && std::abs(expected - p.length) / scale > 1e-6) {
            const RoadEdge& e = net.edge(k);
            report.unitAnomalies.push_back(
                ValidationIssue{k, e.from, e.to, std::abs(expected - p.length) / scale});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------

inline std::string serializePreprocessReport(const PreprocessReport& r) {
    std::string out = "rehail-preprocess-report v1\n";
    out += "violations-before " + std::to_string(r.violationsBefore) + "\n";
    out += "split-edges " + std::to_string(r.splitEdges) + "\n";
    out += "wait-zone-nodes " + std::to_string(r.waitZoneNodes) + "\n";
    for (const InsertedNode& in : r.insertedNodes)
        out += "inserted " + std::to_string(in.newNode) + " " + std::to_string(in.originalFrom) +
               " " + std::to_string(in.originalTo) + " " + std::to_string(in.originalEdge) + "\n";
    out += "end\n";
    return out;
}

inline std::string serializeValidationReport(const ValidationReport& r) {
    std::string out = "rehail-validation-report v1\n";
    for (const auto& v : r.localMaximaViolations)
        out += "local-maxima-violation " + std::to_string(v.edge) + " " + std::to_string(v.from) +
               " " + std::to_string(v.to) + " " + fmt7(v.magnitude) + "\n";
    for (NodeId id : r.deadZoneNodes) out += "dead-zone-node " + std::to_string(id) + "\n";
    for (EdgeIndex k : r.deadZoneEdges) out += "dead-zone-edge " + std::to_string(k) + "\n";
    for (NodeId id : r.unreachableNodes) out += "unreachable-node " + std::to_string(id) + "\n";
    for (const auto& v : r.unitAnomalies)
        out += "unit-anomaly " + std::to_string(v.edge) + " " + std::to_string(v.from) + " " +
               std::to_string(v.to) + " " + fmt7(v.magnitude) + "\n";
    out += "end\n";
    return out;
}

} // namespace rehail
