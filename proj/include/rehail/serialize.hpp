#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rehail/errors.hpp"
#include "rehail/network.hpp"

// Structured text format family. Every document starts with a line
// "rehail-<kind> v1", ends with "end", and carries one record per line with
// space-separated fields. Blank lines and lines starting with '#' are ignored
// on read and never emitted, so writer output is canonical: identical values
// always produce identical bytes. Floating-point fields use the shortest
// decimal form that round-trips exactly (std::to_chars), which makes
// serialize -> parse value-identical and output byte-stable across runs.

namespace rehail {

// ---------------------------------------------------------------------------
// Number formatting / parsing
// ---------------------------------------------------------------------------

/// Shortest exactly round-tripping decimal form.
inline std::string fmtDouble(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

/// Fixed 7-significant-digit form for human-facing tables and golden files.
inline std::string fmt7(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.7g", v);
    return std::string(buf);
}

inline double parseDouble(std::string_view text, std::size_t line = 0) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("bad number '" + std::string(text) + "'", line);
    return v;
}

inline std::uint64_t parseU64(std::string_view text, std::size_t line = 0) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("bad integer '" + std::string(text) + "'", line);
    return v;
}

/// FNV-1a 64-bit digest, reported as 16 hex digits. Used for content
/// references between files (policy -> network, output -> manifest).
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hashHex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Line reader / tokenizer
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> splitFields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

/// Iterates meaningful records of a rehail text document.
class DocReader {
public:
    DocReader(std::string_view text, std::string expectedKind) : text_(text) {
        auto fields = next();
        if (fields.size() != 2 || fields[0] != "rehail-" + expectedKind || fields[1] != "v1")
            throw ParseError("expected header 'rehail-" + expectedKind + " v1'", line_);
        kind_ = std::move(expectedKind);
    }

    /// Next non-blank, non-comment record split into fields; empty at "end".
    std::vector<std::string> next() {
        while (pos_ < text_.size()) {
            std::size_t eol = text_.find('\n', pos_);
            if (eol == std::string_view::npos) eol = text_.size();
            std::string_view raw = text_.substr(pos_, eol - pos_);
            pos_ = eol + 1;
            ++line_;
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            bool blank = true;
            for (char c : raw)
                if (c != ' ' && c != '\t') { blank = false; break; }
            if (blank) continue;
            std::size_t first = raw.find_first_not_of(" \t");
            if (raw[first] == '#') continue;
            std::vector<std::string> out;
            for (auto f : splitFields(raw)) out.emplace_back(f);
            if (out.size() == 1 && out[0] == "end") { ended_ = true; return {}; }
            return out;
        }
        if (!ended_) throw ParseError("missing 'end' terminator", line_);
        return {};
    }

    std::size_t line() const { return line_; }

private:
    std::string_view text_;
    std::string kind_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
    bool ended_ = false;
};

} // namespace detail

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void writeFile(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Network document
// ---------------------------------------------------------------------------

/// Schema v1. All rates per minute, distances in meters, times in minutes.
///   rehail-network v1
///   meta <key> <value...>                        (optional, repeatable)
///   nodes <count>
///   node <id> <lat> <lon> <stayQ> <stayR>
///   edges <count>
///   edge <from> <to> <Q> <R> <T> <S> <length>
///   end
inline std::string serializeNetwork(const RoadNetwork& net,
                                    const std::vector<std::pair<std::string, std::string>>& meta = {}) {
    std::string out = "rehail-network v1\n";
    for (const auto& [k, v] : meta) out += "meta " + k + " " + v + "\n";
    out += "nodes " + std::to_string(net.nodeCount()) + "\n";
    for (const RoadNode& nd : net.nodes()) {
        out += "node " + std::to_string(nd.id) + " " + fmtDouble(nd.lat) + " " +
               fmtDouble(nd.lon) + " " + fmtDouble(nd.stay.pickupRate) + " " +
               fmtDouble(nd.stay.rideProfit) + "\n";
    }
    out += "edges " + std::to_string(net.edgeCount()) + "\n";
    for (const RoadEdge& e : net.edges()) {
        out += "edge " + std::to_string(e.from) + " " + std::to_string(e.to) + " " +
               fmtDouble(e.params.pickupRate) + " " + fmtDouble(e.params.rideProfit) + " " +
               fmtDouble(e.params.travelTime) + " " + fmtDouble(e.params.speed) + " " +
               fmtDouble(e.params.length) + "\n";
    }
    out += "end\n";
    return out;
}

/// Canonical content hash of a network: digest of its serialized form with no
/// meta lines, so formatting or annotations in a file never change identity.
inline std::string networkContentHash(const RoadNetwork& net) {
    return hashHex(serializeNetwork(net));
}

inline RoadNetwork parseNetwork(std::string_view text,
                                std::vector<std::pair<std::string, std::string>>* metaOut = nullptr) {
    detail::DocReader doc(text, "network");
    std::vector<RoadNode> nodes;
    std::vector<RoadEdge> edges;
    std::size_t nodeCount = 0, edgeCount = 0;
    bool sawNodes = false, sawEdges = false;

    for (auto rec = doc.next(); !rec.empty(); rec = doc.next()) {
        if (rec[0] == "meta") {
            if (rec.size() < 3) throw ParseError("meta needs key and value", doc.line());
            if (metaOut) {
                std::string value = rec[2];
                for (std::size_t i = 3; i < rec.size(); ++i) value += " " + rec[i];
                metaOut->emplace_back(rec[1], value);
            }
        } else if (rec[0] == "nodes" && rec.size() == 2) {
            nodeCount = parseU64(rec[1], doc.line());
            nodes.reserve(nodeCount);
            sawNodes = true;
        } else if (rec[0] == "node" && rec.size() == 6) {
            nodes.push_back(makeNode(static_cast<NodeId>(parseU64(rec[1], doc.line())),
                                     parseDouble(rec[2], doc.line()), parseDouble(rec[3], doc.line()),
                                     parseDouble(rec[4], doc.line()), parseDouble(rec[5], doc.line())));
        } else if (rec[0] == "edges" && rec.size() == 2) {
            edgeCount = parseU64(rec[1], doc.line());
            edges.reserve(edgeCount);
            sawEdges = true;
        } else if (rec[0] == "edge" && rec.size() == 8) {
            RoadEdge e;
            e.from = static_cast<NodeId>(parseU64(rec[1], doc.line()));
            e.to = static_cast<NodeId>(parseU64(rec[2], doc.line()));
            e.params.pickupRate = parseDouble(rec[3], doc.line());
            e.params.rideProfit = parseDouble(rec[4], doc.line());
            e.params.travelTime = parseDouble(rec[5], doc.line());
            e.params.speed = parseDouble(rec[6], doc.line());
            e.params.length = parseDouble(rec[7], doc.line());
            edges.push_back(e);
        } else {
            throw ParseError("unrecognized network record '" + rec[0] + "'", doc.line());
        }
    }
    if (!sawNodes || !sawEdges) throw ParseError("missing nodes/edges counts", doc.line());
    if (nodes.size() != nodeCount) throw ParseError("node count mismatch", doc.line());
    if (edges.size() != edgeCount) throw ParseError("edge count mismatch", doc.line());
    return buildNetwork(std::move(nodes), std::move(edges), /*allowParallelEdges=*/true);
}

} // namespace rehail
