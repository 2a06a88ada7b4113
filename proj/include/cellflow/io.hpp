#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/network.hpp"

#include <nlohmann/json.hpp>

namespace cellflow {

enum class Orientation { node, edge };

inline const char* to_string(Orientation o) {
    return o == Orientation::node ? "node" : "edge";
}

/// One snapshot of a node or edge signal, keyed by element ids.
struct SignalTable {
    Orientation orientation = Orientation::node;
    std::vector<std::string> ids;
    std::vector<double> values;
    std::string snapshot_id;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void check_table(const SignalTable& t) {
    if (t.ids.size() != t.values.size())
        throw ArgumentError("signal table: ids/values length mismatch");
}

}  // namespace detail

/// Writes `id,value` CSV. Doubles keep 17 significant digits so the
/// round-trip through read_table is lossless.
inline void write_table(const SignalTable& table, const std::string& path) {
    detail::check_table(table);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    out << "id,value\n";
    for (size_t i = 0; i < table.ids.size(); ++i)
        out << table.ids[i] << ',' << detail::format_double(table.values[i]) << '\n';
    if (!out) throw IoError("write failed for \"" + path + "\"");
}

inline SignalTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open \"" + path + "\" for reading");
    SignalTable t;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "id,value")
                throw ParseError("expected header \"id,value\", got \"" + line + "\"", line_no);
            header_seen = true;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("expected \"id,value\" row", line_no);
        t.ids.push_back(line.substr(0, comma));
        try {
            t.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError("bad number \"" + line.substr(comma + 1) + "\"", line_no);
        }
    }
    if (!header_seen) throw ParseError("missing \"id,value\" header", 0);
    return t;
}

/// Checks that every table id exists in the network on the table's side.
inline void check_ids_against(const SignalTable& t, const Network& net) {
    detail::check_table(t);
    std::unordered_set<std::string> known;
    if (t.orientation == Orientation::node)
        for (const Node& n : net.nodes) known.insert(n.id);
    else
        for (const Edge& e : net.edges) known.insert(e.id);
    for (const auto& id : t.ids)
        if (!known.count(id))
            throw StructuralError("table id \"" + id + "\" not in network");
}

// ---------------------------------------------------------------------------
// Canonical JSON network export
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Network& net) {
    nlohmann::ordered_json j;
    j["name"] = net.name;
    j["source"] = net.source;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const Node& n : net.nodes) {
        nlohmann::ordered_json jn;
        jn["id"] = n.id;
        jn["kind"] = to_string(n.kind);
        jn["elevation"] = n.elevation;
        jn["demand"] = n.demand;
        if (n.fixed_head) jn["fixed_head"] = *n.fixed_head;
        j["nodes"].push_back(std::move(jn));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const Edge& e : net.edges) {
        nlohmann::ordered_json je;
        je["id"] = e.id;
        je["kind"] = to_string(e.kind);
        je["tail"] = net.nodes[e.tail].id;
        je["head"] = net.nodes[e.head].id;
        je["length"] = e.length;
        je["diameter"] = e.diameter;
        je["roughness"] = e.roughness;
        j["edges"].push_back(std::move(je));
    }
    return j;
}

inline std::string serialize_network(const Network& net) { return to_json(net).dump(2); }

inline Network network_from_json(const nlohmann::json& j) {
    Network net;
    net.name = j.value("name", "");
    net.source = j.value("source", "");
    for (const auto& jn : j.at("nodes")) {
        Node n;
        n.id = jn.at("id").get<std::string>();
        std::string kind = jn.at("kind").get<std::string>();
        n.kind = kind == "junction" ? NodeKind::junction
               : kind == "reservoir" ? NodeKind::reservoir
                                     : NodeKind::tank;
        n.elevation = jn.value("elevation", 0.0);
        n.demand = jn.value("demand", 0.0);
        if (jn.contains("fixed_head")) n.fixed_head = jn.at("fixed_head").get<double>();
        net.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
        Edge e;
        e.id = je.at("id").get<std::string>();
        std::string kind = je.at("kind").get<std::string>();
        e.kind = kind == "pipe" ? EdgeKind::pipe
               : kind == "pump" ? EdgeKind::pump
                                : EdgeKind::valve;
        e.tail = net.node_index(je.at("tail").get<std::string>());
        e.head = net.node_index(je.at("head").get<std::string>());
        if (e.tail < 0 || e.head < 0)
            throw StructuralError("edge \"" + e.id + "\" references a missing node");
        e.length = je.value("length", 0.0);
        e.diameter = je.value("diameter", 0.0);
        e.roughness = je.value("roughness", 0.0);
        net.edges.push_back(std::move(e));
    }
    validate(net);
    return net;
}

inline Network deserialize_network(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad network JSON: ") + e.what());
    }
    return network_from_json(j);
}

// ---------------------------------------------------------------------------
// Matrix exports (inspection formats)
// ---------------------------------------------------------------------------

template <typename Derived>
void write_matrix_csv(const Eigen::MatrixBase<Derived>& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << detail::format_double(static_cast<double>(m(i, j)));
        }
        out << '\n';
    }
}

/// "row col value" lines, zero entries omitted.
template <typename Derived>
void write_matrix_triplets(const Eigen::MatrixBase<Derived>& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0)
                out << i << ' ' << j << ' '
                    << detail::format_double(static_cast<double>(m(i, j))) << '\n';
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open \"" + path + "\" for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    out << text;
    if (!out) throw IoError("write failed for \"" + path + "\"");
}

}  // namespace cellflow
