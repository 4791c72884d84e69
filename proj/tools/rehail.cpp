// rehail: between-ride routing toolkit for ride-hailing drivers.
//
// Subcommands:
//   ingest   OSM extract + grid + config -> network file
//   solve    network + driver economics -> optimal policy file
//   route    policy + network + start -> node sequence with survival values
//   compare  optimal vs shortest-route heuristic, per node
//   stats    network summary table
//
// Exit codes: 0 success, 1 internal invariant violation, 2 bad input.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rehail/evaluation.hpp"
#include "rehail/geo.hpp"
#include "rehail/geojson.hpp"
#include "rehail/manifest.hpp"
#include "rehail/network.hpp"
#include "rehail/osm.hpp"
#include "rehail/preprocess.hpp"
#include "rehail/serialize.hpp"
#include "rehail/solver.hpp"

namespace {

using namespace rehail;

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void emit(const std::optional<std::string>& outPath, const std::string& content) {
    if (outPath) {
        writeFile(*outPath, content);
    } else {
        std::cout << content;
    }
}

// --------------------------------------------------------------------------
// ingest
// --------------------------------------------------------------------------

int cmdIngest(const std::string& osmPath, const std::string& gridPath,
              const std::string& configPath, const std::string& outPath) {
    const auto t0 = Clock::now();
    const std::string osmText = readFile(osmPath);
    const std::string gridText = readFile(gridPath);
    const std::string configText = readFile(configPath);

    const IngestConfig config = parseIngestConfig(configText);
    const GridField grid = parseGrid(gridText);

    RunManifest manifest;
    manifest.command = "ingest";
    manifest.inputs = {{osmPath, hashHex(osmText)},
                       {gridPath, hashHex(gridText)},
                       {configPath, hashHex(configText)}};
    manifest.speedScale = config.speedScale;

    const RawGraph raw = parseOsm(osmText, config);
    IngestReport report;
    const RoadNetwork net = applyGrid(raw, grid, &report);

    const std::string body = serializeNetwork(net, {{"manifest", manifest.coreHash()}});
    manifest.dataProcessSeconds = secondsSince(t0);
    manifest.outputs = {outPath};
    writeFile(outPath, body);
    writeFile(outPath + ".manifest.json", manifest.toJson());

    std::cout << "ingested " << net.nodeCount() << " vertices, " << net.edgeCount()
              << " directed edges (ways kept " << raw.waysKept << "/" << raw.waysSeen
              << ", discarded outside main component: " << report.discardedNodes << " nodes, "
              << report.discardedSegments << " segments)\n";
    std::cout << "wrote " << outPath << "\n";
    return 0;
}

// --------------------------------------------------------------------------
// solve
// --------------------------------------------------------------------------

RoadNetwork scaleSpeeds(const RoadNetwork& net, double speedScale) {
    if (speedScale == 1.0) return net;
    std::vector<RoadNode> nodes = net.nodes();
    std::vector<RoadEdge> edges = net.edges();
    for (RoadEdge& e : edges) {
        e.params.speed *= speedScale;
        e.params.travelTime /= speedScale;
    }
    return buildNetwork(std::move(nodes), std::move(edges), /*allowParallelEdges=*/true);
}

int cmdSolve(const std::string& networkPath, double wage, double fuel, double speedScale,
             const std::string& outPath) {
    const std::string netText = readFile(networkPath);
    const RoadNetwork input = parseNetwork(netText);
    const DriverParams driver{wage, fuel};

    RunManifest manifest;
    manifest.command = "solve";
    manifest.inputs = {{networkPath, hashHex(netText)}};
    manifest.driver = driver;
    manifest.speedScale = speedScale;

    const auto t0 = Clock::now();
    const RoadNetwork scaled = scaleSpeeds(input, speedScale);
    const auto [effective, prepReport] = enforceLocalMaxima(scaled, driver);
    const auto [policy, solveReport] = solve(effective, driver);
    manifest.algorithmSeconds = secondsSince(t0);

    const std::string effectiveHash = networkContentHash(effective);
    std::vector<std::pair<std::string, std::string>> meta = {
        {"manifest", manifest.coreHash()},
        {"speed-scale", fmtDouble(speedScale)},
    };
    manifest.outputs = {outPath};

    // If preprocessing or scaling changed the graph, the policy indexes a
    // different network than the input file; write that network alongside so
    // `route` has something matching to load.
    if (effectiveHash != networkContentHash(input)) {
        const std::string effectivePath = outPath + ".effective.network";
        writeFile(effectivePath, serializeNetwork(effective, {{"manifest", manifest.coreHash()}}));
        manifest.outputs.push_back(effectivePath);
        std::cout << "preprocessing split " << prepReport.splitEdges
                  << " edge(s); effective network written to " << effectivePath << "\n";
    }

    writeFile(outPath, serializePolicy(policy, driver, effectiveHash, meta));
    writeFile(outPath + ".manifest.json", manifest.toJson());

    std::cout << "solved " << effective.nodeCount() << " nodes in " << solveReport.passes
              << " pass(es), " << fmt7(*manifest.algorithmSeconds) << "s algorithm time\n";
    std::cout << "wrote " << outPath << "\n";
    return 0;
}

// --------------------------------------------------------------------------
// route
// --------------------------------------------------------------------------

NodeId resolveStart(const RoadNetwork& net, const std::string& start, double snapRadius) {
    const auto comma = start.find(',');
    if (comma == std::string::npos) {
        NodeId id = 0;
        try {
            id = static_cast<NodeId>(std::stoul(start));
        } catch (const std::exception&) {
            throw InvalidParamsError("start must be a node id or 'lat,lon', got '" + start + "'");
        }
        if (id >= net.nodeCount())
            throw InvalidParamsError("start node " + std::to_string(id) + " does not exist (" +
                                     std::to_string(net.nodeCount()) + " nodes)");
        return id;
    }
    double lat = 0, lon = 0;
    try {
        lat = std::stod(start.substr(0, comma));
        lon = std::stod(start.substr(comma + 1));
    } catch (const std::exception&) {
        throw InvalidParamsError("cannot parse coordinates '" + start + "'");
    }
    NodeId best = 0;
    double bestDist = std::numeric_limits<double>::infinity();
    for (const RoadNode& nd : net.nodes()) {
        const double d = haversineMeters(lat, lon, nd.lat, nd.lon);
        if (d < bestDist) {
            bestDist = d;
            best = nd.id;
        }
    }
    if (bestDist > snapRadius)
        throw InvalidParamsError("no node within " + fmt7(snapRadius) + " m of " + start +
                                 " (nearest is " + fmt7(bestDist) + " m away)");
    return best;
}

int cmdRoute(const std::string& policyPath, const std::string& networkPath,
             const std::string& start, const std::string& format, double snapRadius,
             const std::optional<std::string>& outPath) {
    const std::string policyText = readFile(policyPath);
    const std::string netText = readFile(networkPath);
    const PolicyDocument doc = parsePolicy(policyText);
    const RoadNetwork net = parseNetwork(netText);

    const std::string netHash = networkContentHash(net);
    if (!doc.networkHash.empty() && doc.networkHash != netHash)
        throw InvalidParamsError("policy was solved against network " + doc.networkHash +
                                 " but this file hashes to " + netHash +
                                 "; pass the matching (effective) network");
    if (doc.policy.next.size() != net.nodeCount())
        throw InvalidParamsError("policy covers " + std::to_string(doc.policy.next.size()) +
                                 " nodes, network has " + std::to_string(net.nodeCount()));

    const NodeId startNode = resolveStart(net, start, snapRadius);
    const PathResult path = extractPath(doc.policy, startNode);

    RoutePlan plan;
    plan.nodes = path.nodes;
    plan.terminalAction = path.terminal.kind;
    plan.survival = survivalAlongRoute(net, plan.nodes);
    plan.expectedProfit = doc.policy.value[startNode];

    RunManifest manifest;
    manifest.command = "route";
    manifest.inputs = {{policyPath, hashHex(policyText)}, {networkPath, hashHex(netText)}};
    manifest.driver = doc.driver;

    if (format == "geojson") {
        emit(outPath, routeGeoJson(net, plan, manifest.coreHash()));
    } else {
        emit(outPath, serializeRoutePlan(plan));
    }
    if (outPath) {
        manifest.outputs = {*outPath};
        writeFile(*outPath + ".manifest.json", manifest.toJson());
    }
    return 0;
}

// --------------------------------------------------------------------------
// compare
// --------------------------------------------------------------------------

int cmdCompare(const std::string& networkPath, double wage, double fuel, double speedScale,
               const std::optional<std::string>& outPath) {
    const std::string netText = readFile(networkPath);
    const RoadNetwork input = parseNetwork(netText);
    const DriverParams driver{wage, fuel};

    const RoadNetwork scaled = scaleSpeeds(input, speedScale);
    const auto [net, prepReport] = enforceLocalMaxima(scaled, driver);
    const auto [policy, solveReport] = solve(net, driver);
    const BaselineSweep baseline = shortestRouteBaselineAll(net, driver);

    RunManifest manifest;
    manifest.command = "compare";
    manifest.inputs = {{networkPath, hashHex(netText)}};
    manifest.driver = driver;
    manifest.speedScale = speedScale;

    std::string out = "rehail-compare v1\n";
    out += "meta manifest " + manifest.coreHash() + "\n";
    out += "# node optimal baseline improvement\n";
    double sumOpt = 0, sumBase = 0, sumImp = 0, maxImp = 0;
    std::size_t improvable = 0, unreachable = 0;
    for (NodeId x = 0; x < net.nodeCount(); ++x) {
        out += "row " + std::to_string(x) + " " + fmt7(policy.value[x]) + " ";
        if (!baseline.reachable[x]) {
            out += "unreachable unreachable\n";
            ++unreachable;
            continue;
        }
        const double base = baseline.value[x];
        out += fmt7(base) + " ";
        sumOpt += policy.value[x];
        sumBase += base;
        if (base > 1e-12) {
            const double imp = (policy.value[x] - base) / base;
            out += fmt7(imp) + "\n";
            sumImp += imp;
            maxImp = std::max(maxImp, imp);
            ++improvable;
        } else {
            out += "n/a\n";
        }
    }
    const std::size_t counted = net.nodeCount() - unreachable;
    out += "summary nodes " + std::to_string(net.nodeCount()) + " unreachable " +
           std::to_string(unreachable) + "\n";
    out += "summary mean-optimal " + fmt7(counted ? sumOpt / counted : 0.0) + "\n";
    out += "summary mean-baseline " + fmt7(counted ? sumBase / counted : 0.0) + "\n";
    out += "summary mean-improvement " + fmt7(improvable ? sumImp / improvable : 0.0) + "\n";
    out += "summary max-improvement " + fmt7(maxImp) + "\n";
    out += "end\n";

    emit(outPath, out);
    if (outPath) {
        manifest.outputs = {*outPath};
        writeFile(*outPath + ".manifest.json", manifest.toJson());
    }
    if (unreachable > 0) {
        std::cerr << "warning: " << unreachable
                  << " node(s) cannot reach the best waiting node; rows flagged, summary "
                     "excludes them\n";
        return 2;
    }
    return 0;
}

// --------------------------------------------------------------------------
// stats
// --------------------------------------------------------------------------

std::string coordStr(double value, char pos, char neg) {
    return fmt7(std::abs(value)) + (value >= 0 ? pos : neg);
}

int cmdStats(const std::string& networkPath, const std::optional<std::string>& manifestPath) {
    const RoadNetwork net = parseNetwork(readFile(networkPath));

    BBox box{net.node(0).lat, net.node(0).lon, net.node(0).lat, net.node(0).lon};
    for (const RoadNode& nd : net.nodes()) box.expand(nd.lat, nd.lon);

    std::string dataTime = "unavailable";
    std::string algoTime = "unavailable";
    const std::string mPath = manifestPath ? *manifestPath : networkPath + ".manifest.json";
    try {
        const RunManifest m = RunManifest::fromJson(readFile(mPath));
        if (m.dataProcessSeconds) dataTime = fmt7(*m.dataProcessSeconds) + "s";
        if (m.algorithmSeconds) algoTime = fmt7(*m.algorithmSeconds) + "s";
    } catch (const std::exception&) {
        // no manifest next to the network; timings stay unavailable
    }

    std::printf("Network size        %zu Edges, %zu Vertices\n", net.edgeCount(), net.nodeCount());
    std::printf("Data-process time   %s\n", dataTime.c_str());
    std::printf("Algorithm time      %s\n", algoTime.c_str());
    std::printf("Total area          %s km^2\n", fmt7(box.areaKm2()).c_str());
    std::printf("Top-right           %s, %s\n", coordStr(box.latMax, 'N', 'S').c_str(),
                coordStr(box.lonMax, 'E', 'W').c_str());
    std::printf("Bottom-left         %s, %s\n", coordStr(box.latMin, 'N', 'S').c_str(),
                coordStr(box.lonMin, 'E', 'W').c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"between-ride routing toolkit for ride-hailing drivers"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse an OSM extract into a network file");
    std::string osmPath, gridPath, outPath;
    std::string configPath;
    if (const char* env = std::getenv("REHAIL_CONFIG")) configPath = env;
    ingest->add_option("osm", osmPath, "OSM XML extract")->required();
    ingest->add_option("grid", gridPath, "grid field file (per-cell Q and R)")->required();
    ingest->add_option("--config", configPath,
                       "ingest config file (defaults to $REHAIL_CONFIG)");
    ingest->add_option("-o,--out", outPath, "output network file")->required();

    // solve
    auto* solveCmd = app.add_subcommand("solve", "compute the optimal policy for every node");
    std::string solveNetwork, solveOut;
    double wage = 0, fuel = 0, speedScale = 1.0;
    solveCmd->add_option("network", solveNetwork, "network file")->required();
    solveCmd->add_option("--wage", wage, "driver wage, currency per minute")->required();
    solveCmd->add_option("--fuel", fuel, "fuel+vehicle cost, currency per meter")
        ->default_val(0.0);
    solveCmd->add_option("--speed-scale", speedScale,
                         "congestion multiplier on speeds (0.5 halves all speeds)")
        ->default_val(1.0);
    solveCmd->add_option("-o,--out", solveOut, "output policy file")->required();

    // route
    auto* route = app.add_subcommand("route", "extract the optimal route from a start node");
    std::string routePolicy, routeNetwork, routeStart, routeFormat = "text";
    double snapRadius = 250.0;
    std::string routeOut;
    route->add_option("policy", routePolicy, "policy file from solve")->required();
    route->add_option("network", routeNetwork, "matching network file")->required();
    route->add_option("--start", routeStart, "node id or 'lat,lon'")->required();
    route->add_option("--format", routeFormat, "text or geojson")
        ->check(CLI::IsMember({"text", "geojson"}))
        ->default_val("text");
    route->add_option("--snap-radius", snapRadius, "max meters from 'lat,lon' to a node")
        ->default_val(250.0);
    route->add_option("-o,--out", routeOut, "output file (default stdout)");

    // compare
    auto* compare = app.add_subcommand("compare", "optimal value vs shortest-route heuristic");
    std::string compareNetwork, compareOut;
    double cWage = 0, cFuel = 0, cScale = 1.0;
    compare->add_option("network", compareNetwork, "network file")->required();
    compare->add_option("--wage", cWage, "driver wage, currency per minute")->required();
    compare->add_option("--fuel", cFuel, "fuel+vehicle cost, currency per meter")->default_val(0.0);
    compare->add_option("--speed-scale", cScale, "congestion multiplier on speeds")->default_val(1.0);
    compare->add_option("-o,--out", compareOut, "output table file (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "network summary table");
    std::string statsNetwork;
    std::string statsManifest;
    stats->add_option("network", statsNetwork, "network file")->required();
    stats->add_option("--manifest", statsManifest,
                      "run manifest to read timings from (default <network>.manifest.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto validateDriver = [](double w, double f, double scale) {
            if (!(std::isfinite(w) && w >= 0)) throw InvalidParamsError("wage must be >= 0");
            if (!(std::isfinite(f) && f >= 0)) throw InvalidParamsError("fuel cost must be >= 0");
            if (!(std::isfinite(scale) && scale > 0))
                throw InvalidParamsError("speed scale must be > 0");
        };
        if (ingest->parsed()) {
            if (configPath.empty())
                throw InvalidParamsError("no config file: pass --config or set REHAIL_CONFIG");
            return cmdIngest(osmPath, gridPath, configPath, outPath);
        }
        if (solveCmd->parsed()) {
            validateDriver(wage, fuel, speedScale);
            return cmdSolve(solveNetwork, wage, fuel, speedScale, solveOut);
        }
        if (route->parsed()) {
            return cmdRoute(routePolicy, routeNetwork, routeStart, routeFormat, snapRadius,
                            routeOut.empty() ? std::nullopt : std::optional(routeOut));
        }
        if (compare->parsed()) {
            validateDriver(cWage, cFuel, cScale);
            return cmdCompare(compareNetwork, cWage, cFuel, cScale,
                              compareOut.empty() ? std::nullopt : std::optional(compareOut));
        }
        if (stats->parsed()) {
            return cmdStats(statsNetwork,
                            statsManifest.empty() ? std::nullopt : std::optional(statsManifest));
        }
    } catch (const CycleDetectedError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
