#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rehail/network.hpp"
#include "rehail/preprocess.hpp"
#include "rehail/serialize.hpp"

namespace rehail {

// ---------------------------------------------------------------------------
// Actions and policies
// ---------------------------------------------------------------------------

enum class ActionKind : std::uint8_t { GotoNode, Stay, Stop };

/// One routing decision. Stay means waiting at the node until matched (the
/// wait duration is unbounded; finite waits are never needed). Stop is the
/// transition to the terminal state with zero onward value.
struct Action {
    ActionKind kind = ActionKind::Stop;
    NodeId target = 0;  // meaningful only for GotoNode

    static Action gotoNode(NodeId to) { return {ActionKind::GotoNode, to}; }
    static Action stay() { return {ActionKind::Stay, 0}; }
    static Action stop() { return {ActionKind::Stop, 0}; }

    bool operator==(const Action& o) const {
        return kind == o.kind && (kind != ActionKind::GotoNode || target == o.target);
    }
};

/// Optimal (or candidate) stationary policy: per-node expected profit and the
/// action that attains it.
struct Policy {
    std::vector<double> value;
    std::vector<Action> next;
    std::uint32_t passesUsed = 0;
};

struct SolveReport {
    std::uint32_t passes = 0;
    std::uint64_t relaxationsApplied = 0;
    double wallTimeSeconds = 0;
    bool converged = false;
};

struct SolveOptions {
    /// Stop once a full pass improves no value by more than this. The default
    /// of 0 stops on the first pass that applies no update at all, which is
    /// stricter than needed (the pass cap already guarantees exactness) and
    /// keeps early-stopped runs bitwise equal to full-length runs.
    double tolerance = 0.0;
    /// Pass cap; 0 means the node count, which suffices for exactness on
    /// preprocessed networks. Smaller values give truncated-horizon solves.
    std::uint32_t passLimit = 0;
    /// Refuse networks failing the local-maxima scan (callers must preprocess).
    bool checkAssumptions = true;
    /// Ignore the change-detection stop and always run passLimit passes.
    bool forceFullPasses = false;
    /// In-place sequential relaxation, or synchronous two-buffer passes with
    /// edges partitioned across workers.
    enum class Mode : std::uint8_t { Sequential, Parallel } mode = Mode::Sequential;
    unsigned workers = 0;  // parallel mode; 0 picks hardware concurrency
};

// ---------------------------------------------------------------------------
// Relaxation
// ---------------------------------------------------------------------------

/// Value of committing to edge e when the head node is worth headValue:
///     (R - (w + f S)/Q)(1 - e^(-Q T)) + e^(-Q T) headValue
/// With Q = 0 the edge can never match and the limit is plain travel cost:
///     -T (w + f S) + headValue.
inline double relaxValue(const EdgeParams& e, const DriverParams& driver, double headValue) {
    const double unitCost = driver.wage + driver.fuelCost * e.speed;
    if (e.pickupRate == 0.0) return -e.travelTime * unitCost + headValue;
    const double carry = std::exp(-e.pickupRate * e.travelTime);
    return (e.rideProfit - unitCost / e.pickupRate) * (1.0 - carry) + carry * headValue;
}

namespace detail {

/// Deterministic relaxation order: ascending (from, to, edge index).
inline std::vector<EdgeIndex> scanOrder(const RoadNetwork& net) {
    std::vector<EdgeIndex> order(net.edgeCount());
    std::iota(order.begin(), order.end(), EdgeIndex{0});
    std::stable_sort(order.begin(), order.end(), [&](EdgeIndex a, EdgeIndex b) {
        const RoadEdge& ea = net.edge(a);
        const RoadEdge& eb = net.edge(b);
        if (ea.from != eb.from) return ea.from < eb.from;
        if (ea.to != eb.to) return ea.to < eb.to;
        return a < b;
    });
    return order;
}

inline void initPolicy(const RoadNetwork& net, const DriverParams& driver, Policy& policy) {
    const std::size_t n = net.nodeCount();
    policy.value.resize(n);
    policy.next.resize(n);
    for (NodeId x = 0; x < n; ++x) {
        const double stay = stayValue(net.node(x), driver);
        if (stay >= 0.0) {
            policy.value[x] = stay;
            policy.next[x] = Action::stay();
        } else {
            policy.value[x] = 0.0;  // stopping dominates negative waiting
            policy.next[x] = Action::stop();
        }
    }
}

} // namespace detail

/// Computes the optimal stationary policy for every node at once by passes of
/// edge relaxation over the whole network. Values start at max(0, stay value)
/// and only ever increase; a node's action changes only on strict improvement,
/// so equal-valued candidates keep the incumbent (Stay beats an equal move,
/// earlier-scanned edges beat later ones). At most n passes are needed, and
/// the run stops early on the first pass that changes nothing.
///
/// Requires the local-maxima condition to hold (see enforceLocalMaxima);
/// throws AssumptionViolatedError otherwise.
inline std::pair<Policy, SolveReport> solve(const RoadNetwork& net, const DriverParams& driver,
                                            const SolveOptions& options = {}) {
    requireFiniteDriver(driver);
    if (options.checkAssumptions) {
        const std::vector<EdgeIndex> bad = scanLocalMaxima(net, driver);
        if (!bad.empty()) {
            const RoadEdge& e = net.edge(bad.front());
            throw AssumptionViolatedError(
                "network violates the local-maxima condition on " + std::to_string(bad.size()) +
                " edge(s), first at edge " + std::to_string(bad.front()) + " (" +
                std::to_string(e.from) + "->" + std::to_string(e.to) +
                "); run enforceLocalMaxima first");
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = net.nodeCount();
    const std::uint32_t passLimit =
        options.passLimit ? options.passLimit : static_cast<std::uint32_t>(std::max<std::size_t>(n, 1));

    Policy policy;
    detail::initPolicy(net, driver, policy);
    SolveReport report;

    if (options.mode == SolveOptions::Mode::Sequential) {
        const std::vector<EdgeIndex> order = detail::scanOrder(net);
        for (std::uint32_t pass = 1; pass <= passLimit; ++pass) {
            double maxChange = 0.0;
            for (EdgeIndex k : order) {
                const RoadEdge& e = net.edge(k);
                const double candidate = relaxValue(e.params, driver, policy.value[e.to]);
                if (candidate > policy.value[e.from]) {
                    maxChange = std::max(maxChange, candidate - policy.value[e.from]);
                    policy.value[e.from] = candidate;
                    policy.next[e.from] = Action::gotoNode(e.to);
                    ++report.relaxationsApplied;
                }
            }
            report.passes = pass;
            if (!options.forceFullPasses && maxChange <= options.tolerance) {
                report.converged = true;
                break;
            }
        }
    } else {
        // Synchronous two-buffer passes: every node's new value is computed
        // from the previous pass's buffer, so edge groups can be relaxed by
        // any number of workers with no ordering effects. A join per pass is
        // the barrier.
        std::vector<double> prev = policy.value;
        std::vector<double> cur(n);
        std::vector<Action> nextActions = policy.next;
        unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
        workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
        std::vector<std::uint64_t> applied(workers, 0);
        std::vector<double> change(workers, 0.0);

        for (std::uint32_t pass = 1; pass <= passLimit; ++pass) {
            const auto worker = [&](unsigned w) {
                const NodeId lo = static_cast<NodeId>(n * w / workers);
                const NodeId hi = static_cast<NodeId>(n * (w + 1) / workers);
                for (NodeId x = lo; x < hi; ++x) {
                    double best = prev[x];
                    Action act = nextActions[x];
                    for (EdgeIndex k : net.outgoing(x)) {
                        const RoadEdge& e = net.edge(k);
                        const double candidate = relaxValue(e.params, driver, prev[e.to]);
                        if (candidate > best) {
                            best = candidate;
                            act = Action::gotoNode(e.to);
                            ++applied[w];
                        }
                    }
                    change[w] = std::max(change[w], best - prev[x]);
                    cur[x] = best;
                    nextActions[x] = act;
                }
            };
            std::fill(change.begin(), change.end(), 0.0);
            if (workers == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(workers);
                for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
                for (auto& t : pool) t.join();
            }
            prev.swap(cur);
            report.passes = pass;
            const double maxChange = *std::max_element(change.begin(), change.end());
            if (!options.forceFullPasses && maxChange <= options.tolerance) {
                report.converged = true;
                break;
            }
        }
        policy.value = std::move(prev);
        policy.next = std::move(nextActions);
        report.relaxationsApplied = std::accumulate(applied.begin(), applied.end(), std::uint64_t{0});
    }

    // Hitting the pass cap is also exact: n relaxation passes solve the
    // n-stage equivalent of the infinite-horizon problem.
    if (!report.converged && report.passes >= n) report.converged = true;
    policy.passesUsed = report.passes;
    report.wallTimeSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(policy), report};
}

// ---------------------------------------------------------------------------
// Path extraction and acyclicity
// ---------------------------------------------------------------------------

struct PathResult {
    std::vector<NodeId> nodes;
    Action terminal;  // Stay or Stop
};

/// Follows next-pointers from start until the action is Stay or Stop. A
/// policy honoring the solve() invariants terminates within n steps without
/// revisiting a node; anything else is a solver bug and raises
/// CycleDetectedError.
inline PathResult extractPath(const Policy& policy, NodeId start) {
    const std::size_t n = policy.next.size();
    if (start >= n) throw InvalidParamsError("start node " + std::to_string(start) + " out of range");
    PathResult result;
    std::vector<char> visited(n, 0);
    NodeId x = start;
    for (;;) {
        if (visited[x])
            throw CycleDetectedError("policy revisits node " + std::to_string(x) +
                                     "; solve() must never produce this");
        visited[x] = 1;
        result.nodes.push_back(x);
        const Action& a = policy.next[x];
        if (a.kind != ActionKind::GotoNode) {
            result.terminal = a;
            return result;
        }
        if (a.target >= n) throw InvalidParamsError("policy targets node out of range");
        x = a.target;
    }
}

struct AcyclicityCheck {
    bool acyclic = true;
    std::vector<NodeId> cycle;  // witness when acyclic is false
};

/// True iff following next from every node terminates within n steps without
/// node repetition; otherwise returns the offending cycle.
inline AcyclicityCheck assertAcyclic(const Policy& policy) {
    const std::size_t n = policy.next.size();
    // 0 unvisited, 1 on current chain, 2 known-terminating
    std::vector<std::uint8_t> color(n, 0);
    for (NodeId s = 0; s < n; ++s) {
        if (color[s]) continue;
        std::vector<NodeId> chain;
        NodeId x = s;
        while (true) {
            if (color[x] == 2) break;
            if (color[x] == 1) {
                AcyclicityCheck check;
                check.acyclic = false;
                auto it = std::find(chain.begin(), chain.end(), x);
                check.cycle.assign(it, chain.end());
                return check;
            }
            color[x] = 1;
            chain.push_back(x);
            const Action& a = policy.next[x];
            if (a.kind != ActionKind::GotoNode) break;
            if (a.target >= n) throw InvalidParamsError("policy targets node out of range");
            x = a.target;
        }
        for (NodeId v : chain) color[v] = 2;
    }
    return {};
}

// ---------------------------------------------------------------------------
// Policy document
// ---------------------------------------------------------------------------

/// Schema v1, ordered by node id:
///   rehail-policy v1
///   meta <key> <value...>          (optional)
///   network <fnv1a64 hex>          (canonical hash of the solved network)
///   driver <wage> <fuelCost>
///   passes <count>
///   nodes <n>
///   node <id> <value> stay|stop|goto [target]
///   end
struct PolicyDocument {
    Policy policy;
    DriverParams driver;
    std::string networkHash;
    std::vector<std::pair<std::string, std::string>> meta;
};

inline std::string serializePolicy(const Policy& policy, const DriverParams& driver,
                                   const std::string& networkHash,
                                   const std::vector<std::pair<std::string, std::string>>& meta = {}) {
    std::string out = "rehail-policy v1\n";
    for (const auto& [k, v] : meta) out += "meta " + k + " " + v + "\n";
    out += "network " + networkHash + "\n";
    out += "driver " + fmtDouble(driver.wage) + " " + fmtDouble(driver.fuelCost) + "\n";
    out += "passes " + std::to_string(policy.passesUsed) + "\n";
    out += "nodes " + std::to_string(policy.value.size()) + "\n";
    for (std::size_t x = 0; x < policy.value.size(); ++x) {
        out += "node " + std::to_string(x) + " " + fmtDouble(policy.value[x]) + " ";
        switch (policy.next[x].kind) {
            case ActionKind::Stay: out += "stay"; break;
            case ActionKind::Stop: out += "stop"; break;
            case ActionKind::GotoNode: out += "goto " + std::to_string(policy.next[x].target); break;
        }
        out += "\n";
    }
    out += "end\n";
    return out;
}

inline PolicyDocument parsePolicy(std::string_view text) {
    detail::DocReader doc(text, "policy");
    PolicyDocument result;
    std::size_t expected = 0;
    bool sawCount = false;
    for (auto rec = doc.next(); !rec.empty(); rec = doc.next()) {
        if (rec[0] == "meta" && rec.size() >= 3) {
            std::string value = rec[2];
            for (std::size_t i = 3; i < rec.size(); ++i) value += " " + rec[i];
            result.meta.emplace_back(rec[1], value);
        } else if (rec[0] == "network" && rec.size() == 2) {
            result.networkHash = rec[1];
        } else if (rec[0] == "driver" && rec.size() == 3) {
            result.driver.wage = parseDouble(rec[1], doc.line());
            result.driver.fuelCost = parseDouble(rec[2], doc.line());
        } else if (rec[0] == "passes" && rec.size() == 2) {
            result.policy.passesUsed = static_cast<std::uint32_t>(parseU64(rec[1], doc.line()));
        } else if (rec[0] == "nodes" && rec.size() == 2) {
            expected = parseU64(rec[1], doc.line());
            sawCount = true;
            result.policy.value.reserve(expected);
        } else if (rec[0] == "node" && rec.size() >= 4) {
            const NodeId id = static_cast<NodeId>(parseU64(rec[1], doc.line()));
            if (id != result.policy.value.size())
                throw ParseError("policy nodes must appear in id order", doc.line());
            result.policy.value.push_back(parseDouble(rec[2], doc.line()));
            if (rec[3] == "stay" && rec.size() == 4) {
                result.policy.next.push_back(Action::stay());
            } else if (rec[3] == "stop" && rec.size() == 4) {
                result.policy.next.push_back(Action::stop());
            } else if (rec[3] == "goto" && rec.size() == 5) {
                result.policy.next.push_back(
                    Action::gotoNode(static_cast<NodeId>(parseU64(rec[4], doc.line()))));
            } else {
                throw ParseError("bad action '" + rec[3] + "'", doc.line());
            }
        } else {
            throw ParseError("unrecognized policy record '" + rec[0] + "'", doc.line());
        }
    }
    if (!sawCount || result.policy.value.size() != expected)
        throw ParseError("policy node count mismatch", doc.line());
    return result;
}

} // namespace rehail
