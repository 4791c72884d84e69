#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rehail/network.hpp"
#include "rehail/serialize.hpp"

namespace rehail {

/// Record of one CLI run: what was invoked, on which input content, with
/// which parameters, how long it took and what it wrote. The identity hash
/// covers command, input content hashes, parameters and seed; timings and
/// output paths stay out of it so reruns of identical inputs stamp identical
/// hashes into their outputs.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> content hash
    std::optional<DriverParams> driver;
    double speedScale = 1.0;
    std::uint64_t seed = 0;
    std::optional<double> dataProcessSeconds;
    std::optional<double> algorithmSeconds;
    std::vector<std::string> outputs;

    std::string coreHash() const {
        std::string core = command + "\n";
        std::vector<std::string> hashes;
        for (const auto& [path, hash] : inputs) hashes.push_back(hash);
        std::sort(hashes.begin(), hashes.end());
        for (const auto& h : hashes) core += h + "\n";
        if (driver) core += fmtDouble(driver->wage) + " " + fmtDouble(driver->fuelCost) + "\n";
        core += fmtDouble(speedScale) + "\n";
        core += std::to_string(seed) + "\n";
        return hashHex(core);
    }

    std::string toJson() const {
        nlohmann::json j;
        j["rehail_manifest_version"] = 1;
        j["command"] = command;
        nlohmann::json in = nlohmann::json::object();
        for (const auto& [path, hash] : inputs) in[path] = hash;
        j["inputs"] = in;
        if (driver) j["driver"] = {{"wage", driver->wage}, {"fuel_cost", driver->fuelCost}};
        j["speed_scale"] = speedScale;
        j["seed"] = seed;
        nlohmann::json t = nlohmann::json::object();
        if (dataProcessSeconds) t["data_process_seconds"] = *dataProcessSeconds;
        if (algorithmSeconds) t["algorithm_seconds"] = *algorithmSeconds;
        j["timings"] = t;
        j["outputs"] = outputs;
        j["manifest_hash"] = coreHash();
        return j.dump(2) + "\n";
    }

    static RunManifest fromJson(const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text);
        RunManifest m;
        m.command = j.value("command", "");
        if (j.contains("inputs"))
            for (auto& [path, hash] : j["inputs"].items())
                m.inputs.emplace_back(path, hash.get<std::string>());
        if (j.contains("driver"))
            m.driver = DriverParams{j["driver"].value("wage", 0.0), j["driver"].value("fuel_cost", 0.0)};
        m.speedScale = j.value("speed_scale", 1.0);
        m.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("timings")) {
            const auto& t = j["timings"];
            if (t.contains("data_process_seconds"))
                m.dataProcessSeconds = t["data_process_seconds"].get<double>();
            if (t.contains("algorithm_seconds"))
                m.algorithmSeconds = t["algorithm_seconds"].get<double>();
        }
        if (j.contains("outputs"))
            for (const auto& o : j["outputs"]) m.outputs.push_back(o.get<std::string>());
        return m;
    }
};

} // namespace rehail
