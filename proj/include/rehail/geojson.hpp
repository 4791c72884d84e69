#pragma once

#include <string>

#include <json.hpp>

#include "rehail/evaluation.hpp"
#include "rehail/network.hpp"

namespace rehail {

/// Renders a route plan as an RFC 7946 FeatureCollection: one LineString in
/// WGS84 lon-lat order carrying the per-vertex survival probabilities, plus a
/// Point marking where the driver finally waits (or stops). Single-node
/// routes emit only the marker. `manifestHash`, when set, is attached as a
/// foreign member so outputs reference the run that produced them.
inline std::string routeGeoJson(const RoadNetwork& net, const RoutePlan& plan,
                                const std::string& manifestHash = {}) {
    nlohmann::json features = nlohmann::json::array();

    if (plan.nodes.size() >= 2) {
        nlohmann::json coords = nlohmann::json::array();
        for (NodeId id : plan.nodes) {
            const RoadNode& nd = net.node(id);
            coords.push_back({nd.lon, nd.lat});
        }
        features.push_back({
            {"type", "Feature"},
            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
            {"properties",
             {{"kind", "route"}, {"survival", plan.survival}, {"nodes", plan.nodes}}},
        });
    }

    const RoadNode& last = net.node(plan.nodes.back());
    features.push_back({
        {"type", "Feature"},
        {"geometry", {{"type", "Point"}, {"coordinates", {last.lon, last.lat}}}},
        {"properties",
         {{"kind", "terminal"},
          {"action", plan.terminalAction == ActionKind::Stay ? "stay" : "stop"},
          {"node", plan.nodes.back()},
          {"survival", plan.survival.back()}}},
    });

    nlohmann::json doc{{"type", "FeatureCollection"}, {"features", features}};
    if (!manifestHash.empty()) doc["rehail_manifest"] = manifestHash;
    return doc.dump(2) + "\n";
}

} // namespace rehail
