#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rehail/network.hpp"
#include "rehail/serialize.hpp"
#include "rehail/solver.hpp"

namespace rehail {

// ---------------------------------------------------------------------------
// Brute-force finite-horizon oracle
// ---------------------------------------------------------------------------

/// Optimal value for every node when at most horizon+1 decision stages remain,
/// by backward induction over the restricted action set (stay forever, stop,
/// or traverse one edge and continue). horizon = n reproduces the unbounded
/// optimum, since an optimal policy never needs more than n stages.
///
/// This is a deliberately separate recursion with its own arithmetic; it
/// shares no relaxation code with solve() so the two can check each other.
inline std::vector<double> bruteForceValues(const RoadNetwork& net, const DriverParams& driver,
                                            std::uint32_t horizon) {
    requireFiniteDriver(driver);
    const std::size_t n = net.nodeCount();
    std::vector<double> base(n);
    for (NodeId x = 0; x < n; ++x) {
        const EdgeParams& loop = net.node(x).stay;
        const double stay =
            loop.pickupRate > 0.0 ? loop.rideProfit - driver.wage / loop.pickupRate : kNegInf;
        base[x] = std::max(0.0, stay);
    }
    std::vector<double> values = base;
    std::vector<double> prev(n);
    for (std::uint32_t stage = 1; stage <= horizon; ++stage) {
        prev.swap(values);
        for (NodeId x = 0; x < n; ++x) {
            double best = base[x];
            for (EdgeIndex k : net.outgoing(x)) {
                const RoadEdge& e = net.edge(k);
                const double unitCost = driver.wage + driver.fuelCost * e.params.speed;
                double candidate;
                if (e.params.pickupRate == 0.0) {
                    candidate = -e.params.travelTime * unitCost + prev[e.to];
                } else {
                    const double noMatch = std::exp(-e.params.pickupRate * e.params.travelTime);
                    candidate = (1.0 - noMatch) * (e.params.rideProfit - unitCost / e.params.pickupRate) +
                                noMatch * prev[e.to];
                }
                best = std::max(best, candidate);
            }
            values[x] = best;
        }
    }
    return values;
}

// ---------------------------------------------------------------------------
// Fixed-policy evaluation
// ---------------------------------------------------------------------------

namespace detail {

/// Picks the edge a GotoNode action rides: the one from x to target with the
/// best relaxed value given the head's value (lowest index on exact ties).
/// With no parallel roads this is simply the unique connecting edge.
inline EdgeIndex resolvePolicyEdge(const RoadNetwork& net, const DriverParams& driver, NodeId x,
                                   NodeId target, double headValue) {
    EdgeIndex bestEdge = std::numeric_limits<EdgeIndex>::max();
    double best = kNegInf;
    for (EdgeIndex k : net.outgoing(x)) {
        const RoadEdge& e = net.edge(k);
        if (e.to != target) continue;
        const double v = relaxValue(e.params, driver, headValue);
        if (bestEdge == std::numeric_limits<EdgeIndex>::max() || v > best) {
            best = v;
            bestEdge = k;
        }
    }
    if (bestEdge == std::numeric_limits<EdgeIndex>::max())
        throw InvalidParamsError("policy moves " + std::to_string(x) + "->" +
                                 std::to_string(target) + " but no such edge exists");
    return bestEdge;
}

} // namespace detail

/// Expected profit of following a fixed policy from every node: compose the
/// edge relaxation backward along the policy chain, terminating with the stay
/// value at Stay nodes and zero at Stop nodes. The policy must be acyclic.
inline std::vector<double> fixedPolicyValue(const RoadNetwork& net, const DriverParams& driver,
                                            const Policy& policy) {
    requireFiniteDriver(driver);
    const std::size_t n = net.nodeCount();
    if (policy.next.size() != n)
        throw InvalidParamsError("policy size does not match network");
    {
        const AcyclicityCheck check = assertAcyclic(policy);
        if (!check.acyclic) {
            std::string cyc;
            for (NodeId v : check.cycle) cyc += (cyc.empty() ? "" : "->") + std::to_string(v);
            throw CyclicPolicyError("policy has a cycle: " + cyc);
        }
    }
    std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> done(n, 0);
    for (NodeId s = 0; s < n; ++s) {
        if (done[s]) continue;
        // Walk to the chain's terminal, then evaluate backward.
        std::vector<NodeId> chain;
        NodeId x = s;
        while (!done[x]) {
            chain.push_back(x);
            const Action& a = policy.next[x];
            if (a.kind != ActionKind::GotoNode) break;
            x = a.target;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const NodeId v = *it;
            if (done[v]) continue;
            const Action& a = policy.next[v];
            switch (a.kind) {
                case ActionKind::Stop: values[v] = 0.0; break;
                case ActionKind::Stay: values[v] = stayValue(net.node(v), driver); break;
                case ActionKind::GotoNode: {
                    const EdgeIndex k =
                        detail::resolvePolicyEdge(net, driver, v, a.target, values[a.target]);
                    values[v] = relaxValue(net.edge(k).params, driver, values[a.target]);
                    break;
                }
            }
            done[v] = 1;
        }
    }
    return values;
}

// ---------------------------------------------------------------------------
// Monte Carlo episode simulation
// ---------------------------------------------------------------------------

struct SimulationStats {
    std::uint64_t episodes = 0;
    double meanProfit = 0;
    double stdError = 0;
    double matchRate = 0;
    double meanTimeToMatch = 0;  // minutes, over matched episodes (0 if none)
    std::uint64_t seed = 0;
    std::string rngAlgorithm = "mt19937_64+inverse-cdf";
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class ExpSampler {
public:
    explicit ExpSampler(std::uint64_t seed) : rng_(seed) {}

    /// Exponential with the given rate via inverse CDF; +inf when rate is 0.
    double draw(double rate) {
        if (rate == 0.0) return std::numeric_limits<double>::infinity();
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // [0, 1)
        return -std::log1p(-u) / rate;
    }

private:
    std::mt19937_64 rng_;
};

struct EpisodeTotals {
    double profitSum = 0, profitComp = 0;      // Kahan accumulator
    double profitSqSum = 0, profitSqComp = 0;
    double matchTimeSum = 0;
    std::uint64_t matched = 0;

    void addProfit(double p) {
        kahan(profitSum, profitComp, p);
        kahan(profitSqSum, profitSqComp, p * p);
    }
    static void kahan(double& sum, double& comp, double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    void merge(const EpisodeTotals& o) {
        kahan(profitSum, profitComp, o.profitSum);
        kahan(profitSqSum, profitSqComp, o.profitSqSum);
        matchTimeSum += o.matchTimeSum;
        matched += o.matched;
    }
};

} // namespace detail

/// Simulates between-ride episodes that follow `policy` from `start`. Each
/// traversed edge draws an exponential match time at the edge's rate: a match
/// inside the traversal window pays R minus time cost and ends the episode,
/// otherwise the full travel cost accrues and the walk continues. Stay draws
/// the loop rate and always ends matched; Stop ends with zero profit.
///
/// Reproducible: episodes run in fixed 4096-episode blocks, block b seeded
/// with splitmix64(seed ^ b) feeding the documented generator; block partial
/// sums are combined in block order (compensated summation), so results do
/// not depend on the worker count.
inline SimulationStats simulatePolicy(const RoadNetwork& net, const DriverParams& driver,
                                      const Policy& policy, NodeId start, std::uint64_t episodes,
                                      std::uint64_t seed, unsigned workers = 1) {
    requireFiniteDriver(driver);
    if (episodes < 1) throw InvalidParamsError("episodes must be >= 1");
    if (start >= net.nodeCount()) throw InvalidParamsError("start node out of range");
    if (policy.next.size() != net.nodeCount())
        throw InvalidParamsError("policy size does not match network");
    {
        const AcyclicityCheck check = assertAcyclic(policy);
        if (!check.acyclic) throw CyclicPolicyError("cannot simulate a cyclic policy");
    }

    // Resolve the concrete edge for each GotoNode reachable from start, and
    // refuse waits at zero-rate loops (they would never terminate).
    const std::vector<double> values = fixedPolicyValue(net, driver, policy);
    std::vector<EdgeIndex> edgeOf(net.nodeCount(), std::numeric_limits<EdgeIndex>::max());
    for (NodeId x = start;;) {
        const Action& a = policy.next[x];
        if (a.kind == ActionKind::Stay) {
            if (net.node(x).stay.pickupRate == 0.0)
                throw InvalidParamsError("policy waits at node " + std::to_string(x) +
                                         " whose pickup rate is zero");
            break;
        }
        if (a.kind == ActionKind::Stop) break;
        edgeOf[x] = detail::resolvePolicyEdge(net, driver, x, a.target, values[a.target]);
        x = a.target;
    }

    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks = (episodes + kBlock - 1) / kBlock;

    const auto runBlock = [&](std::uint64_t b) {
        detail::EpisodeTotals totals;
        detail::ExpSampler rng(detail::splitmix64(seed ^ b));
        const std::uint64_t count = std::min(kBlock, episodes - b * kBlock);
        for (std::uint64_t i = 0; i < count; ++i) {
            double profit = 0;
            double elapsed = 0;
            bool matched = false;
            NodeId x = start;
            for (;;) {
                const Action& a = policy.next[x];
                if (a.kind == ActionKind::Stop) break;
                if (a.kind == ActionKind::Stay) {
                    const EdgeParams& loop = net.node(x).stay;
                    const double m = rng.draw(loop.pickupRate);
                    profit += loop.rideProfit - m * driver.wage;  // S = 0 while waiting
                    elapsed += m;
                    matched = true;
                    break;
                }
                const RoadEdge& e = net.edge(edgeOf[x]);
                const double unitCost = driver.wage + driver.fuelCost * e.params.speed;
                const double m = rng.draw(e.params.pickupRate);
                if (m < e.params.travelTime) {
                    profit += e.params.rideProfit - m * unitCost;
                    elapsed += m;
                    matched = true;
                    break;
                }
                profit += -e.params.travelTime * unitCost;
                elapsed += e.params.travelTime;
                x = e.to;
            }
            totals.addProfit(profit);
            if (matched) {
                totals.matchTimeSum += elapsed;
                ++totals.matched;
            }
        }
        return totals;
    };

    detail::EpisodeTotals totals;
    workers = std::max(1u, workers);
    if (workers == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) totals.merge(runBlock(b));
    } else {
        for (std::uint64_t base = 0; base < blocks; base += workers) {
            std::vector<std::future<detail::EpisodeTotals>> futures;
            const std::uint64_t hi = std::min<std::uint64_t>(blocks, base + workers);
            for (std::uint64_t b = base; b < hi; ++b)
                futures.push_back(std::async(std::launch::async, runBlock, b));
            for (auto& f : futures) totals.merge(f.get());  // block order preserved
        }
    }

    SimulationStats stats;
    stats.episodes = episodes;
    stats.seed = seed;
    stats.meanProfit = totals.profitSum / static_cast<double>(episodes);
    if (episodes > 1) {
        const double nD = static_cast<double>(episodes);
        const double var =
            std::max(0.0, (totals.profitSqSum - nD * stats.meanProfit * stats.meanProfit) / (nD - 1));
        stats.stdError = std::sqrt(var / nD);
    }
    stats.matchRate = static_cast<double>(totals.matched) / static_cast<double>(episodes);
    stats.meanTimeToMatch =
        totals.matched ? totals.matchTimeSum / static_cast<double>(totals.matched) : 0.0;
    return stats;
}

// ---------------------------------------------------------------------------
// Route plans, survival, and the shortest-route baseline
// ---------------------------------------------------------------------------

struct RoutePlan {
    std::vector<NodeId> nodes;
    ActionKind terminalAction = ActionKind::Stay;
    std::vector<double> survival;  // P(no request yet) on arrival at each node
    double expectedProfit = 0;
};

/// Cumulative probability that no ride request has arrived by each route
/// prefix: survival[0] = 1, then a factor e^(-Q T) per traversed edge.
/// Between parallel roads the lowest-index edge is used.
inline std::vector<double> survivalAlongRoute(const RoadNetwork& net,
                                              std::span<const NodeId> route) {
    std::vector<double> survival;
    if (route.empty()) return survival;
    if (route.front() >= net.nodeCount()) throw NotAPathError("route node out of range");
    survival.reserve(route.size());
    survival.push_back(1.0);
    for (std::size_t i = 1; i < route.size(); ++i) {
        const NodeId a = route[i - 1];
        const NodeId b = route[i];
        if (b >= net.nodeCount()) throw NotAPathError("route node out of range");
        EdgeIndex found = std::numeric_limits<EdgeIndex>::max();
        for (EdgeIndex k : net.outgoing(a)) {
            if (net.edge(k).to == b) { found = k; break; }  // ascending index order
        }
        if (found == std::numeric_limits<EdgeIndex>::max())
            throw NotAPathError("no edge " + std::to_string(a) + "->" + std::to_string(b));
        const EdgeParams& p = net.edge(found).params;
        survival.push_back(survival.back() * std::exp(-p.pickupRate * p.travelTime));
    }
    return survival;
}

namespace detail {

struct DijkstraResult {
    std::vector<double> dist;
    std::vector<EdgeIndex> via;  // edge used to reach each node (single-start)
};

/// Label-setting shortest path on travel time from `start` over directed
/// edges. Deterministic: ties settle by node id, equal-distance relaxations
/// keep the incumbent edge.
inline DijkstraResult dijkstra(const RoadNetwork& net, NodeId start) {
    const std::size_t n = net.nodeCount();
    DijkstraResult r;
    r.dist.assign(n, std::numeric_limits<double>::infinity());
    r.via.assign(n, std::numeric_limits<EdgeIndex>::max());
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    r.dist[start] = 0;
    heap.emplace(0.0, start);
    std::vector<char> settled(n, 0);
    while (!heap.empty()) {
        const auto [d, x] = heap.top();
        heap.pop();
        if (settled[x]) continue;
        settled[x] = 1;
        for (EdgeIndex k : net.outgoing(x)) {
            const RoadEdge& e = net.edge(k);
            const double nd = d + e.params.travelTime;
            if (nd < r.dist[e.to]) {
                r.dist[e.to] = nd;
                r.via[e.to] = k;
                heap.emplace(nd, e.to);
            }
        }
    }
    return r;
}

/// Highest-stay-value node; ties go to the lowest id.
inline NodeId bestStayNode(const RoadNetwork& net, const DriverParams& driver) {
    NodeId best = 0;
    double bestValue = kNegInf;
    for (NodeId x = 0; x < net.nodeCount(); ++x) {
        const double v = stayValue(net.node(x), driver);
        if (v > bestValue) {
            bestValue = v;
            best = x;
        }
    }
    if (bestValue < 0.0)
        throw InvalidParamsError("no node has a non-negative stay value; baseline undefined");
    return best;
}

} // namespace detail

/// The heuristic a reasonable driver might follow: take the minimum-travel-
/// time path to the globally best waiting node and wait there. The plan's
/// expected profit is evaluated with the full model semantics (the driver can
/// still be matched mid-route), so it is directly comparable to solve values.
inline RoutePlan shortestRouteBaseline(const RoadNetwork& net, const DriverParams& driver,
                                       NodeId start) {
    requireFiniteDriver(driver);
    if (start >= net.nodeCount()) throw InvalidParamsError("start node out of range");
    const NodeId target = detail::bestStayNode(net, driver);
    const detail::DijkstraResult sp = detail::dijkstra(net, start);
    if (!std::isfinite(sp.dist[target]))
        throw UnreachableError("best waiting node " + std::to_string(target) +
                               " is unreachable from " + std::to_string(start));

    std::vector<EdgeIndex> pathEdges;
    for (NodeId x = target; x != start; x = net.edge(sp.via[x]).from)
        pathEdges.push_back(sp.via[x]);
    std::reverse(pathEdges.begin(), pathEdges.end());

    RoutePlan plan;
    plan.terminalAction = ActionKind::Stay;
    plan.nodes.push_back(start);
    plan.survival.push_back(1.0);
    for (EdgeIndex k : pathEdges) {
        const EdgeParams& p = net.edge(k).params;
        plan.nodes.push_back(net.edge(k).to);
        plan.survival.push_back(plan.survival.back() * std::exp(-p.pickupRate * p.travelTime));
    }
    double v = stayValue(net.node(target), driver);
    for (auto it = pathEdges.rbegin(); it != pathEdges.rend(); ++it)
        v = relaxValue(net.edge(*it).params, driver, v);
    plan.expectedProfit = v;
    return plan;
}

/// Baseline values for every start node at once via one label-setting search
/// on the reversed graph. Nodes that cannot reach the target are flagged.
struct BaselineSweep {
    NodeId target = 0;
    std::vector<double> value;     // NaN where unreachable
    std::vector<char> reachable;
};

inline BaselineSweep shortestRouteBaselineAll(const RoadNetwork& net, const DriverParams& driver) {
    requireFiniteDriver(driver);
    const std::size_t n = net.nodeCount();
    BaselineSweep sweep;
    sweep.target = detail::bestStayNode(net, driver);
    sweep.value.assign(n, std::numeric_limits<double>::quiet_NaN());
    sweep.reachable.assign(n, 0);

    // Reverse-graph Dijkstra from the target; settle order lets values
    // propagate outward with a single backward relaxation each.
    std::vector<std::vector<EdgeIndex>> incoming(n);
    for (EdgeIndex k = 0; k < net.edgeCount(); ++k) incoming[net.edge(k).to].push_back(k);

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<EdgeIndex> succ(n, std::numeric_limits<EdgeIndex>::max());
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[sweep.target] = 0;
    heap.emplace(0.0, sweep.target);
    std::vector<char> settled(n, 0);
    while (!heap.empty()) {
        const auto [d, x] = heap.top();
        heap.pop();
        if (settled[x]) continue;
        settled[x] = 1;
        sweep.reachable[x] = 1;
        sweep.value[x] = x == sweep.target
                             ? stayValue(net.node(sweep.target), driver)
                             : relaxValue(net.edge(succ[x]).params, driver,
                                          sweep.value[net.edge(succ[x]).to]);
        for (EdgeIndex k : incoming[x]) {
            const RoadEdge& e = net.edge(k);
            const double nd = d + e.params.travelTime;
            if (nd < dist[e.from]) {
                dist[e.from] = nd;
                succ[e.from] = k;
                heap.emplace(nd, e.from);
            }
        }
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

inline std::string serializeRoutePlan(const RoutePlan& plan) {
    std::string out = "rehail-route v1\n";
    out += std::string("terminal ") + (plan.terminalAction == ActionKind::Stay ? "stay" : "stop") + "\n";
    out += "expected-profit " + fmt7(plan.expectedProfit) + "\n";
    for (std::size_t i = 0; i < plan.nodes.size(); ++i)
        out += "node " + std::to_string(plan.nodes[i]) + " " + fmt7(plan.survival[i]) + "\n";
    out += "end\n";
    return out;
}

inline std::string serializeSimulationStats(const SimulationStats& s) {
    std::string out = "rehail-simulation v1\n";
    out += "episodes " + std::to_string(s.episodes) + "\n";
    out += "seed " + std::to_string(s.seed) + "\n";
    out += "rng " + s.rngAlgorithm + "\n";
    out += "mean-profit " + fmt7(s.meanProfit) + "\n";
    out += "std-error " + fmt7(s.stdError) + "\n";
    out += "match-rate " + fmt7(s.matchRate) + "\n";
    out += "mean-time-to-match " + fmt7(s.meanTimeToMatch) + "\n";
    out += "end\n";
    return out;
}

} // namespace rehail
