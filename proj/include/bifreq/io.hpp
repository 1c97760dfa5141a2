#pragma once

// File formats.
//
//   graph        {"vertices":[{"id":"u","side":"A"}, ...], "edges":[["u","v"], ...]}
//   requests     one {"vertex":"u"} per line
//   assignment   {"u":[1,6,11], ...}   global-encoded frequencies
//   run report   JSON, or CSV with columns t,opt,used,bound

#include "bifreq/allocation.hpp"
#include "bifreq/harness.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bifreq {

/// Malformed input file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json parse_json(std::istream& in, const std::string& what)
{
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

inline std::string require_string(const nlohmann::json& j, const std::string& what)
{
    if (!j.is_string()) throw InputError(what + " must be a string, got " + j.dump());
    return j.get<std::string>();
}

} // namespace detail

inline GraphSpec read_graph(std::istream& in)
{
    const auto j = detail::parse_json(in, "graph file");
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
        throw InputError("graph file needs a \"vertices\" array");
    }
    GraphSpec spec;
    for (const auto& v : j["vertices"]) {
        if (v.is_string()) {
            spec.add_vertex(v.get<std::string>());
            continue;
        }
        if (!v.is_object() || !v.contains("id")) throw InputError("vertex entry lacks an id: " + v.dump());
        std::optional<Side> side;
        if (v.contains("side") && !v["side"].is_null()) {
            try {
                side = parse_side(detail::require_string(v["side"], "vertex side"));
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
        }
        spec.add_vertex(detail::require_string(v["id"], "vertex id"), side);
    }
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw InputError("\"edges\" must be an array");
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2) throw InputError("edge must be a pair of ids: " + e.dump());
            spec.edges.emplace_back(detail::require_string(e[0], "edge end"), detail::require_string(e[1], "edge end"));
        }
    }
    return spec;
}

inline void write_graph(std::ostream& out, const GraphSpec& spec)
{
    // Written by hand: an nlohmann document for a large export costs far more
    // memory than the text itself.
    out << "{\"vertices\":[";
    for (std::size_t v = 0; v < spec.ids.size(); ++v) {
        if (v) out << ',';
        out << "{\"id\":" << nlohmann::json(spec.ids[v]).dump();
        if (v < spec.sides.size() && spec.sides[v]) out << ",\"side\":\"" << to_string(*spec.sides[v]) << '"';
        out << '}';
    }
    out << "],\"edges\":[";
    for (std::size_t e = 0; e < spec.edges.size(); ++e) {
        if (e) out << ',';
        out << '[' << nlohmann::json(spec.edges[e].first).dump() << ',' << nlohmann::json(spec.edges[e].second).dump()
            << ']';
    }
    out << "]}\n";
}

inline std::vector<std::string> read_requests(std::istream& in)
{
    std::vector<std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("request line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("vertex")) {
            throw InputError("request line " + std::to_string(lineno) + " lacks \"vertex\"");
        }
        out.push_back(detail::require_string(j["vertex"], "request vertex"));
    }
    return out;
}

inline void write_requests(std::ostream& out, const std::vector<std::string>& ids)
{
    for (const auto& id : ids) out << "{\"vertex\":" << nlohmann::json(id).dump() << "}\n";
}

inline nlohmann::json assignment_json(const BipartiteGraph& g, std::span<const FrequencySet> sets)
{
    nlohmann::json j = nlohmann::json::object();
    for (VertexId v = 0; v < g.vertex_count(); ++v) j[g.id(v)] = sets[v].to_global();
    return j;
}

inline nlohmann::json to_json(const RunReport& report)
{
    nlohmann::json j;
    j["system"] = report.system;
    j["claims"] = {{"r", report.r.to_string()}, {"lambda", report.lambda}};
    j["phases"] = nlohmann::json::array();
    for (const auto& p : report.phases) {
        j["phases"].push_back({{"t", p.t},
                               {"opt", p.opt},
                               {"allocator_t", p.allocator_t},
                               {"used", p.used},
                               {"bound", p.bound},
                               {"within", p.within}});
    }
    j["all_within"] = report.all_within();
    if (!report.phases.empty()) j["ratio"] = detail::rational_to_string(measure_ratio(report, report.lambda));
    return j;
}

inline void write_csv(std::ostream& out, const RunReport& report)
{
    out << "t,opt,used,bound\n";
    for (const auto& p : report.phases) out << p.t << ',' << p.opt << ',' << p.used << ',' << p.bound << '\n';
}

} // namespace bifreq
