#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cellflow/network.hpp"

namespace cellflow {

namespace detail {

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find(';');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline double parse_number(const std::string& tok, int line_no, const char* what) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("expected a number for ") + what + ", got \"" + tok + "\"",
                         line_no);
    }
}

}  // namespace detail

/// Parses the steady-state subset of the EPANET INP format.
///
/// Recognized sections: [TITLE], [JUNCTIONS], [RESERVOIRS], [TANKS],
/// [PIPES], [PUMPS], [VALVES], [DEMANDS], [COORDINATES], [OPTIONS], [END].
/// All other sections are skipped and reported in Network::warnings.
/// Columns are read as SI values (m, m^3/s). [DEMANDS] entries override the
/// junction base demand. Comments start with ';'.
inline Network parse_inp(const std::string& text) {
    Network net;
    net.source = "inp";

    std::unordered_map<std::string, int> node_index;
    std::unordered_map<std::string, double> demand_override;
    std::unordered_set<std::string> warned_sections;

    auto add_node = [&](Node node, int line_no) {
        if (node_index.count(node.id))
            throw StructuralError("line " + std::to_string(line_no) +
                                  ": duplicate node id \"" + node.id + "\"");
        node_index.emplace(node.id, net.node_count());
        net.nodes.push_back(std::move(node));
    };
    auto resolve = [&](const std::string& id, int line_no) {
        auto it = node_index.find(id);
        if (it == node_index.end())
            throw StructuralError("line " + std::to_string(line_no) +
                                  ": edge references unknown node \"" + id + "\"");
        return it->second;
    };

    enum class Section {
        none, title, junctions, reservoirs, tanks, pipes, pumps, valves,
        demands, coordinates, options, skipped, end
    };
    static const std::unordered_map<std::string, Section> kSections = {
        {"[TITLE]", Section::title},      {"[JUNCTIONS]", Section::junctions},
        {"[RESERVOIRS]", Section::reservoirs}, {"[TANKS]", Section::tanks},
        {"[PIPES]", Section::pipes},      {"[PUMPS]", Section::pumps},
        {"[VALVES]", Section::valves},    {"[DEMANDS]", Section::demands},
        {"[COORDINATES]", Section::coordinates}, {"[OPTIONS]", Section::options},
        {"[END]", Section::end},
    };

    Section section = Section::none;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = detail::strip_comment(raw);
        auto fields = detail::split_fields(line);
        if (fields.empty()) continue;

        if (fields[0].front() == '[') {
            std::string header = detail::upper(fields[0]);
            auto it = kSections.find(header);
            if (it == kSections.end()) {
                section = Section::skipped;
                if (warned_sections.insert(header).second)
                    net.warnings.push_back("skipped unsupported section " + header);
            } else {
                section = it->second;
            }
            continue;
        }

        switch (section) {
            case Section::none:
                throw ParseError("data before any section header", line_no);
            case Section::title:
                if (net.name.empty()) net.name = line.substr(line.find_first_not_of(" \t"));
                break;
            case Section::junctions: {
                // id  elevation  [base demand]
                Node n;
                n.id = fields[0];
                n.kind = NodeKind::junction;
                if (fields.size() < 2) throw ParseError("junction row needs an elevation", line_no);
                n.elevation = detail::parse_number(fields[1], line_no, "elevation");
                if (fields.size() >= 3)
                    n.demand = detail::parse_number(fields[2], line_no, "demand");
                add_node(std::move(n), line_no);
                break;
            }
            case Section::reservoirs: {
                // id  head
                Node n;
                n.id = fields[0];
                n.kind = NodeKind::reservoir;
                if (fields.size() < 2) throw ParseError("reservoir row needs a head", line_no);
                n.fixed_head = detail::parse_number(fields[1], line_no, "head");
                n.elevation = *n.fixed_head;
                add_node(std::move(n), line_no);
                break;
            }
            case Section::tanks: {
                // id  elevation  [init level ...]; steady-state snapshot:
                // fixed head = elevation + initial level when present.
                Node n;
                n.id = fields[0];
                n.kind = NodeKind::tank;
                if (fields.size() < 2) throw ParseError("tank row needs an elevation", line_no);
                n.elevation = detail::parse_number(fields[1], line_no, "elevation");
                double level = 0.0;
                if (fields.size() >= 3)
                    level = detail::parse_number(fields[2], line_no, "initial level");
                n.fixed_head = n.elevation + level;
                add_node(std::move(n), line_no);
                break;
            }
            case Section::pipes: {
                // id  node1  node2  length  diameter  roughness
                if (fields.size() < 6) throw ParseError("pipe row needs 6 columns", line_no);
                Edge e;
                e.id = fields[0];
                e.kind = EdgeKind::pipe;
                e.tail = resolve(fields[1], line_no);
                e.head = resolve(fields[2], line_no);
                e.length = detail::parse_number(fields[3], line_no, "length");
                e.diameter = detail::parse_number(fields[4], line_no, "diameter");
                e.roughness = detail::parse_number(fields[5], line_no, "roughness");
                net.edges.push_back(std::move(e));
                break;
            }
            case Section::pumps:
            case Section::valves: {
                // id  node1  node2  [...]  -- flagged, not modeled
                if (fields.size() < 3) throw ParseError("pump/valve row needs 3 columns", line_no);
                Edge e;
                e.id = fields[0];
                e.kind = section == Section::pumps ? EdgeKind::pump : EdgeKind::valve;
                e.tail = resolve(fields[1], line_no);
                e.head = resolve(fields[2], line_no);
                net.edges.push_back(std::move(e));
                break;
            }
            case Section::demands: {
                // junction  demand   (overrides base demand)
                if (fields.size() < 2) throw ParseError("demand row needs 2 columns", line_no);
                resolve(fields[0], line_no);
                demand_override[fields[0]] =
                    detail::parse_number(fields[1], line_no, "demand");
                break;
            }
            case Section::coordinates:
            case Section::options:
            case Section::skipped:
            case Section::end:
                break;
        }
    }

    for (auto& [id, value] : demand_override) {
        Node& n = net.nodes[node_index.at(id)];
        if (n.kind != NodeKind::junction)
            throw StructuralError("[DEMANDS] entry for non-junction \"" + id + "\"");
        n.demand = value;
    }

    {
        std::unordered_set<std::string> edge_ids;
        for (const Edge& e : net.edges)
            if (!edge_ids.insert(e.id).second)
                throw StructuralError("duplicate edge id \"" + e.id + "\"");
    }

    validate(net);
    return net;
}

}  // namespace cellflow
