#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rehail/geo.hpp"
#include "rehail/network.hpp"
#include "rehail/serialize.hpp"

namespace rehail {

// ---------------------------------------------------------------------------
// Grid field: per-cell (Q, R)
// ---------------------------------------------------------------------------

/// Rectangular grid of economic parameters laid over the map. Row 0 starts at
/// latMin, column 0 at lonMin; cells are row-major.
struct GridField {
    BBox bbox;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    struct Cell {
        double pickupRate = 0;
        double rideProfit = 0;
    };
    std::vector<Cell> cells;

    /// Cell containing the coordinate, clamped to the border cells.
    const Cell& cellAt(double lat, double lon) const {
        const double rowH = (bbox.latMax - bbox.latMin) / rows;
        const double colW = (bbox.lonMax - bbox.lonMin) / cols;
        auto clampIdx = [](double v, std::uint32_t n) {
            if (v < 0) return std::uint32_t{0};
            if (v >= n) return n - 1;
            return static_cast<std::uint32_t>(v);
        };
        const std::uint32_t r = clampIdx(std::floor((lat - bbox.latMin) / rowH), rows);
        const std::uint32_t c = clampIdx(std::floor((lon - bbox.lonMin) / colW), cols);
        return cells[std::size_t(r) * cols + c];
    }
};

inline void validateGrid(const GridField& g) {
    if (g.rows == 0 || g.cols == 0) throw InvalidGridError("grid must have at least one cell");
    if (g.bbox.degenerate()) throw InvalidGridError("grid bbox is degenerate");
    if (g.cells.size() != std::size_t(g.rows) * g.cols)
        throw InvalidGridError("grid has " + std::to_string(g.cells.size()) + " cells, expected " +
                               std::to_string(std::size_t(g.rows) * g.cols));
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        if (!(std::isfinite(g.cells[i].pickupRate) && g.cells[i].pickupRate >= 0))
            throw InvalidGridError("cell " + std::to_string(i) + ": pickup rate must be >= 0");
        if (!(std::isfinite(g.cells[i].rideProfit) && g.cells[i].rideProfit > 0))
            throw InvalidGridError("cell " + std::to_string(i) + ": ride profit must be > 0");
    }
}

/// Schema v1:
///   rehail-grid v1
///   bbox <latMin> <lonMin> <latMax> <lonMax>
///   dims <rows> <cols>
///   cell <Q> <R>            (rows*cols lines, row-major from the latMin row)
///   end
inline std::string serializeGrid(const GridField& g) {
    std::string out = "rehail-grid v1\n";
    out += "bbox " + fmtDouble(g.bbox.latMin) + " " + fmtDouble(g.bbox.lonMin) + " " +
           fmtDouble(g.bbox.latMax) + " " + fmtDouble(g.bbox.lonMax) + "\n";
    out += "dims " + std::to_string(g.rows) + " " + std::to_string(g.cols) + "\n";
    for (const auto& c : g.cells)
        out += "cell " + fmtDouble(c.pickupRate) + " " + fmtDouble(c.rideProfit) + "\n";
    out += "end\n";
    return out;
}

inline GridField parseGrid(std::string_view text) {
    detail::DocReader doc(text, "grid");
    GridField g;
    for (auto rec = doc.next(); !rec.empty(); rec = doc.next()) {
        if (rec[0] == "bbox" && rec.size() == 5) {
            g.bbox = BBox{parseDouble(rec[1], doc.line()), parseDouble(rec[2], doc.line()),
                          parseDouble(rec[3], doc.line()), parseDouble(rec[4], doc.line())};
        } else if (rec[0] == "dims" && rec.size() == 3) {
            g.rows = static_cast<std::uint32_t>(parseU64(rec[1], doc.line()));
            g.cols = static_cast<std::uint32_t>(parseU64(rec[2], doc.line()));
        } else if (rec[0] == "cell" && rec.size() == 3) {
            g.cells.push_back({parseDouble(rec[1], doc.line()), parseDouble(rec[2], doc.line())});
        } else {
            throw ParseError("unrecognized grid record '" + rec[0] + "'", doc.line());
        }
    }
    validateGrid(g);
    return g;
}

// ---------------------------------------------------------------------------
// Ingest configuration
// ---------------------------------------------------------------------------

struct IngestConfig {
    std::set<std::string> highwayWhitelist;
    std::map<std::string, double> defaultSpeeds;  // highway tag -> meters/minute
    std::optional<BBox> clip;
    double speedScale = 1.0;
};

inline void validateIngestConfig(const IngestConfig& c) {
    if (c.highwayWhitelist.empty()) throw InvalidParamsError("config whitelists no highway tags");
    if (!(std::isfinite(c.speedScale) && c.speedScale > 0))
        throw InvalidParamsError("speed scale must be finite and > 0");
    for (const std::string& tag : c.highwayWhitelist) {
        auto it = c.defaultSpeeds.find(tag);
        if (it == c.defaultSpeeds.end())
            throw InvalidParamsError("no default speed for whitelisted highway tag '" + tag + "'");
        if (!(std::isfinite(it->second) && it->second > 0))
            throw InvalidParamsError("default speed for '" + tag + "' must be > 0");
    }
    if (c.clip && c.clip->degenerate()) throw InvalidParamsError("clip bbox is degenerate");
}

/// Schema v1:
///   rehail-config v1
///   highway <tag>                  (repeatable)
///   speed <tag> <metersPerMinute>  (repeatable; must cover the whitelist)
///   speed-scale <x>                (optional, default 1)
///   clip <latMin> <lonMin> <latMax> <lonMax>   (optional)
///   end
inline std::string serializeIngestConfig(const IngestConfig& c) {
    std::string out = "rehail-config v1\n";
    for (const std::string& tag : c.highwayWhitelist) out += "highway " + tag + "\n";
    for (const auto& [tag, v] : c.defaultSpeeds) out += "speed " + tag + " " + fmtDouble(v) + "\n";
    out += "speed-scale " + fmtDouble(c.speedScale) + "\n";
    if (c.clip)
        out += "clip " + fmtDouble(c.clip->latMin) + " " + fmtDouble(c.clip->lonMin) + " " +
               fmtDouble(c.clip->latMax) + " " + fmtDouble(c.clip->lonMax) + "\n";
    out += "end\n";
    return out;
}

inline IngestConfig parseIngestConfig(std::string_view text) {
    detail::DocReader doc(text, "config");
    IngestConfig c;
    for (auto rec = doc.next(); !rec.empty(); rec = doc.next()) {
        if (rec[0] == "highway" && rec.size() == 2) {
            c.highwayWhitelist.insert(rec[1]);
        } else if (rec[0] == "speed" && rec.size() == 3) {
            c.defaultSpeeds[rec[1]] = parseDouble(rec[2], doc.line());
        } else if (rec[0] == "speed-scale" && rec.size() == 2) {
            c.speedScale = parseDouble(rec[1], doc.line());
        } else if (rec[0] == "clip" && rec.size() == 5) {
            c.clip = BBox{parseDouble(rec[1], doc.line()), parseDouble(rec[2], doc.line()),
                          parseDouble(rec[3], doc.line()), parseDouble(rec[4], doc.line())};
        } else {
            throw ParseError("unrecognized config record '" + rec[0] + "'", doc.line());
        }
    }
    validateIngestConfig(c);
    return c;
}

// ---------------------------------------------------------------------------
// Minimal OSM XML reader
// ---------------------------------------------------------------------------

namespace osmxml {

struct Element {
    std::string_view name;
    std::vector<std::pair<std::string_view, std::string>> attrs;
    bool selfClosing = false;
    bool closing = false;  // </name>
    std::size_t offset = 0;
};

/// Streaming tokenizer for the XML subset OSM extracts use: elements,
/// attributes, comments, processing instructions and the five predefined
/// entities. No DTD or CDATA handling. Reports byte offsets on errors.
class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    /// Next element event, or nullopt at end of input.
    std::optional<Element> next() {
        for (;;) {
            // skip character data between tags
            while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
            if (pos_ >= text_.size()) return std::nullopt;
            const std::size_t at = pos_;
            if (match("<?")) {
                seek("?>", "unterminated processing instruction", at);
                continue;
            }
            if (match("<!--")) {
                seek("-->", "unterminated comment", at);
                continue;
            }
            if (match("<!")) {
                seek(">", "unterminated declaration", at);
                continue;
            }
            ++pos_;  // '<'
            Element el;
            el.offset = at;
            if (peek() == '/') {
                ++pos_;
                el.closing = true;
            }
            el.name = readName(at);
            skipSpace();
            while (peek() != '>' && peek() != '/' && peek() != '\0') {
                const std::string_view key = readName(pos_);
                skipSpace();
                require('=', "expected '=' after attribute name");
                skipSpace();
                const char quote = peek();
                if (quote != '"' && quote != '\'')
                    throw MalformedXmlError("attribute value must be quoted", pos_);
                ++pos_;
                el.attrs.emplace_back(key, readAttrValue(quote));
                skipSpace();
            }
            if (peek() == '/') {
                ++pos_;
                el.selfClosing = true;
            }
            require('>', "expected '>'");
            if (el.closing && el.selfClosing)
                throw MalformedXmlError("closing tag cannot self-close", at);
            return el;
        }
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool match(std::string_view token) {
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void seek(std::string_view token, const char* what, std::size_t from) {
        const std::size_t at = text_.find(token, pos_);
        if (at == std::string_view::npos) throw MalformedXmlError(what, from);
        pos_ = at + token.size();
    }

    void require(char c, const char* what) {
        if (peek() != c) throw MalformedXmlError(what, pos_);
        ++pos_;
    }

    void skipSpace() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    static bool nameChar(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == ':' || c == '-' || c == '.';
    }

    std::string_view readName(std::size_t at) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && nameChar(text_[pos_])) ++pos_;
        if (pos_ == start) throw MalformedXmlError("expected a name", at);
        return text_.substr(start, pos_ - start);
    }

    std::string readAttrValue(char quote) {
        std::string out;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != quote) {
            const char c = text_[pos_];
            if (c == '&') {
                const std::size_t semi = text_.find(';', pos_);
                if (semi == std::string_view::npos || semi - pos_ > 8)
                    throw MalformedXmlError("bad entity reference", pos_);
                const std::string_view ent = text_.substr(pos_ + 1, semi - pos_ - 1);
                if (ent == "amp") out += '&';
                else if (ent == "lt") out += '<';
                else if (ent == "gt") out += '>';
                else if (ent == "quot") out += '"';
                else if (ent == "apos") out += '\'';
                else if (!ent.empty() && ent[0] == '#') {
                    const long code = std::strtol(std::string(ent.substr(1)).c_str(), nullptr,
                                                  ent.size() > 1 && ent[1] == 'x' ? 16 : 10);
                    if (code <= 0 || code > 127)
                        throw MalformedXmlError("unsupported character reference", pos_);
                    out += static_cast<char>(code);
                } else {
                    throw MalformedXmlError("unknown entity '&" + std::string(ent) + ";'", pos_);
                }
                pos_ = semi + 1;
                continue;
            }
            out += c;
            ++pos_;
        }
        if (pos_ >= text_.size()) throw MalformedXmlError("unterminated attribute value", start);
        ++pos_;  // closing quote
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace osmxml

// ---------------------------------------------------------------------------
// OSM extract -> raw road graph
// ---------------------------------------------------------------------------

struct RawNode {
    std::int64_t osmId = 0;
    double lat = 0;
    double lon = 0;
};

struct RawSegment {
    NodeId from = 0;
    NodeId to = 0;
    double lengthMeters = 0;
    double speed = 0;  // meters/minute, speedScale already applied
    std::int64_t wayId = 0;
};

struct RawGraph {
    std::vector<RawNode> nodes;       // dense ids, ascending OSM id
    std::vector<RawSegment> segments;
    std::uint64_t waysSeen = 0;
    std::uint64_t waysKept = 0;
    std::uint64_t clippedSegments = 0;
    std::uint64_t missingRefSegments = 0;
    std::uint64_t zeroLengthSegments = 0;
};

namespace detail {

/// Parses a maxspeed tag value: plain numbers are km/h, with "mph" miles per
/// hour. Returns meters/minute, or nullopt for anything unusable ("none",
/// "walk", zero, ...), which falls back to the configured default.
inline std::optional<double> parseMaxspeed(std::string_view v) {
    double number = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), number);
    if (ec != std::errc() || number <= 0) return std::nullopt;
    std::string_view unit(ptr, v.data() + v.size() - ptr);
    while (!unit.empty() && unit.front() == ' ') unit.remove_prefix(1);
    while (!unit.empty() && unit.back() == ' ') unit.remove_suffix(1);
    if (unit.empty() || unit == "km/h" || unit == "kmh" || unit == "kph")
        return number * 1000.0 / 60.0;
    if (unit == "mph") return number * 1609.344 / 60.0;
    return std::nullopt;
}

} // namespace detail

/// Parses an OSM XML extract into a raw directed road graph. Keeps ways whose
/// highway tag is whitelisted, splits them at junctions (nodes shared between
/// kept ways or repeated within one), and measures segment length by
/// great-circle distance summed over the way geometry. Intermediate geometry
/// nodes do not become graph nodes. Two-way streets yield one directed
/// segment per direction; oneway=yes only forward, oneway=-1 only backward.
inline RawGraph parseOsm(std::string_view xml, const IngestConfig& config) {
    validateIngestConfig(config);

    struct WayData {
        std::int64_t id = 0;
        std::vector<std::int64_t> refs;
        double speed = 0;
        int direction = 0;  // 0 both, +1 forward only, -1 backward only
    };

    std::unordered_map<std::int64_t, std::pair<double, double>> coords;
    std::vector<WayData> ways;
    RawGraph raw;

    osmxml::Reader reader(xml);
    std::optional<WayData> current;
    std::optional<std::string> highway;
    std::optional<std::string> maxspeed;
    std::optional<std::string> oneway;

    const auto attr = [](const osmxml::Element& el, std::string_view key) -> const std::string* {
        for (const auto& [k, v] : el.attrs)
            if (k == key) return &v;
        return nullptr;
    };

    const auto finishWay = [&]() {
        if (!current) return;
        ++raw.waysSeen;
        if (highway && config.highwayWhitelist.count(*highway)) {
            WayData w = std::move(*current);
            std::optional<double> posted;
            if (maxspeed) posted = detail::parseMaxspeed(*maxspeed);
            w.speed = (posted ? *posted : config.defaultSpeeds.at(*highway)) * config.speedScale;
            if (oneway) {
                if (*oneway == "yes" || *oneway == "true" || *oneway == "1") w.direction = 1;
                else if (*oneway == "-1" || *oneway == "reverse") w.direction = -1;
            }
            if (w.refs.size() >= 2) {
                ways.push_back(std::move(w));
                ++raw.waysKept;
            }
        }
        current.reset();
        highway.reset();
        maxspeed.reset();
        oneway.reset();
    };

    while (auto el = reader.next()) {
        if (el->closing) {
            if (el->name == "way") finishWay();
            continue;
        }
        if (el->name == "node") {
            const std::string* id = attr(*el, "id");
            const std::string* lat = attr(*el, "lat");
            const std::string* lon = attr(*el, "lon");
            if (!id || !lat || !lon)
                throw MalformedXmlError("node element missing id/lat/lon", el->offset);
            try {
                coords[std::stoll(*id)] = {std::stod(*lat), std::stod(*lon)};
            } catch (const std::exception&) {
                throw MalformedXmlError("node element has unparseable id/lat/lon", el->offset);
            }
        } else if (el->name == "way") {
            finishWay();  // tolerate a missing close tag on the previous way
            const std::string* id = attr(*el, "id");
            if (!id) throw MalformedXmlError("way element missing id", el->offset);
            current = WayData{};
            try {
                current->id = std::stoll(*id);
            } catch (const std::exception&) {
                throw MalformedXmlError("way element has unparseable id", el->offset);
            }
            if (el->selfClosing) finishWay();
        } else if (el->name == "nd" && current) {
            const std::string* ref = attr(*el, "ref");
            if (!ref) throw MalformedXmlError("nd element missing ref", el->offset);
            try {
                current->refs.push_back(std::stoll(*ref));
            } catch (const std::exception&) {
                throw MalformedXmlError("nd element has unparseable ref", el->offset);
            }
        } else if (el->name == "tag" && current) {
            const std::string* k = attr(*el, "k");
            const std::string* v = attr(*el, "v");
            if (!k || !v) throw MalformedXmlError("tag element missing k/v", el->offset);
            if (*k == "highway") highway = *v;
            else if (*k == "maxspeed") maxspeed = *v;
            else if (*k == "oneway") oneway = *v;
        }
    }
    finishWay();

    if (ways.empty()) throw EmptyExtractError("no whitelisted highway ways in the extract");

    // A node is a junction when it starts/ends a kept way or appears in kept
    // ways more than once.
    std::unordered_map<std::int64_t, std::uint32_t> usage;
    for (const WayData& w : ways) {
        for (std::int64_t ref : w.refs) ++usage[ref];
        ++usage[w.refs.front()];
        ++usage[w.refs.back()];
    }

    const auto clipped = [&](std::int64_t ref) {
        if (!config.clip) return false;
        const auto it = coords.find(ref);
        return it != coords.end() && !config.clip->contains(it->second.first, it->second.second);
    };

    struct PendingSegment {
        std::int64_t fromRef, toRef;
        double length;
        double speed;
        std::int64_t wayId;
        int direction;
    };
    std::vector<PendingSegment> pending;

    for (const WayData& w : ways) {
        enum class Broken { No, MissingRef, Clipped };
        std::size_t segStart = 0;
        Broken broken = Broken::No;
        double length = 0;
        for (std::size_t i = 1; i < w.refs.size(); ++i) {
            const auto a = coords.find(w.refs[i - 1]);
            const auto b = coords.find(w.refs[i]);
            if (a == coords.end() || b == coords.end()) {
                broken = Broken::MissingRef;
            } else if (clipped(w.refs[i - 1]) || clipped(w.refs[i])) {
                if (broken == Broken::No) broken = Broken::Clipped;
            } else if (broken == Broken::No) {
                length += haversineMeters(a->second.first, a->second.second, b->second.first,
                                          b->second.second);
            }
            const bool junction = usage[w.refs[i]] >= 2 || i + 1 == w.refs.size();
            if (!junction) continue;
            if (broken == Broken::MissingRef) {
                ++raw.missingRefSegments;
            } else if (broken == Broken::Clipped) {
                ++raw.clippedSegments;
            } else if (w.refs[segStart] == w.refs[i]) {
                // closed loop with no interior junction; nothing to keep
            } else if (length <= 0) {
                ++raw.zeroLengthSegments;
            } else {
                pending.push_back({w.refs[segStart], w.refs[i], length, w.speed, w.id, w.direction});
            }
            segStart = i;
            length = 0;
            broken = Broken::No;
        }
    }

    if (pending.empty())
        throw EmptyExtractError("whitelisted ways produced no usable road segments");

    // Dense node ids by ascending OSM id, covering only referenced junctions.
    std::set<std::int64_t> junctions;
    for (const PendingSegment& s : pending) {
        junctions.insert(s.fromRef);
        junctions.insert(s.toRef);
    }
    std::unordered_map<std::int64_t, NodeId> dense;
    raw.nodes.reserve(junctions.size());
    for (std::int64_t ref : junctions) {
        dense[ref] = static_cast<NodeId>(raw.nodes.size());
        const auto& [lat, lon] = coords.at(ref);
        raw.nodes.push_back(RawNode{ref, lat, lon});
    }

    for (const PendingSegment& s : pending) {
        const NodeId a = dense.at(s.fromRef);
        const NodeId b = dense.at(s.toRef);
        if (s.direction >= 0) raw.segments.push_back(RawSegment{a, b, s.length, s.speed, s.wayId});
        if (s.direction <= 0) raw.segments.push_back(RawSegment{b, a, s.length, s.speed, s.wayId});
    }
    return raw;
}

// ---------------------------------------------------------------------------
// Grid application
// ---------------------------------------------------------------------------

struct IngestReport {
    std::uint32_t discardedNodes = 0;      // outside the largest weak component
    std::uint32_t discardedSegments = 0;
    std::uint32_t components = 0;
    std::uint64_t gridClampedAssignments = 0;  // coordinates outside the grid bbox
};

/// Assigns (Q, R) to every node and segment from the grid cell containing it
/// (segments by their geometric midpoint), keeps the largest weakly connected
/// component, and builds the final network. Deterministic: node order follows
/// ascending OSM id.
inline RoadNetwork applyGrid(const RawGraph& raw, const GridField& grid,
                             IngestReport* reportOut = nullptr) {
    validateGrid(grid);
    if (raw.nodes.empty() || raw.segments.empty())
        throw EmptyExtractError("raw graph is empty");

    IngestReport report;

    // Largest weak component; ties go to the component holding the lowest id.
    std::vector<NodeId> parent(raw.nodes.size());
    for (NodeId i = 0; i < parent.size(); ++i) parent[i] = i;
    const auto find = [&](NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const RawSegment& s : raw.segments) {
        const NodeId a = find(s.from), b = find(s.to);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::unordered_map<NodeId, std::uint32_t> componentSize;
    for (NodeId i = 0; i < parent.size(); ++i) ++componentSize[find(i)];
    report.components = static_cast<std::uint32_t>(componentSize.size());
    NodeId keepRoot = 0;
    std::uint32_t keepSize = 0;
    for (NodeId i = 0; i < parent.size(); ++i) {
        const NodeId root = find(i);
        if (componentSize[root] > keepSize) {
            keepSize = componentSize[root];
            keepRoot = root;
        }
    }

    std::vector<NodeId> remap(raw.nodes.size(), std::numeric_limits<NodeId>::max());
    std::vector<RoadNode> nodes;
    for (NodeId i = 0; i < raw.nodes.size(); ++i) {
        if (find(i) != keepRoot) {
            ++report.discardedNodes;
            continue;
        }
        const RawNode& rn = raw.nodes[i];
        if (!grid.bbox.contains(rn.lat, rn.lon)) ++report.gridClampedAssignments;
        const GridField::Cell& cell = grid.cellAt(rn.lat, rn.lon);
        remap[i] = static_cast<NodeId>(nodes.size());
        nodes.push_back(makeNode(remap[i], rn.lat, rn.lon, cell.pickupRate, cell.rideProfit));
    }

    std::vector<RoadEdge> edges;
    for (const RawSegment& s : raw.segments) {
        if (remap[s.from] == std::numeric_limits<NodeId>::max() ||
            remap[s.to] == std::numeric_limits<NodeId>::max()) {
            ++report.discardedSegments;
            continue;
        }
        const RawNode& a = raw.nodes[s.from];
        const RawNode& b = raw.nodes[s.to];
        const double midLat = (a.lat + b.lat) / 2;
        const double midLon = (a.lon + b.lon) / 2;
        if (!grid.bbox.contains(midLat, midLon)) ++report.gridClampedAssignments;
        const GridField::Cell& cell = grid.cellAt(midLat, midLon);
        EdgeParams p;
        p.pickupRate = cell.pickupRate;
        p.rideProfit = cell.rideProfit;
        p.speed = s.speed;
        p.length = s.lengthMeters;
        p.travelTime = s.lengthMeters / s.speed;
        edges.push_back(RoadEdge{remap[s.from], remap[s.to], p});
    }

    if (reportOut) *reportOut = report;
    return buildNetwork(std::move(nodes), std::move(edges), /*allowParallelEdges=*/true);
}

} // namespace rehail
