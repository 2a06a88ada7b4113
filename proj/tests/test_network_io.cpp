#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "cellflow/inp.hpp"
#include "cellflow/io.hpp"
#include "cellflow/synthetic.hpp"
#include "fixtures.hpp"

using namespace cellflow;

namespace {
std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("parse_inp builds the minimal network", "[network-io]") {
    Network net = parse_inp(fixtures::minimal_inp());
    REQUIRE(net.node_count() == 3);
    REQUIRE(net.edge_count() == 2);
    CHECK(net.name == "Minimal test system");
    CHECK(net.nodes[net.node_index("R1")].kind == NodeKind::reservoir);
    CHECK(net.nodes[net.node_index("R1")].fixed_head == 50.0);
    CHECK(net.nodes[net.node_index("J2")].demand == 0.020);
    CHECK(net.edges[0].tail == net.node_index("R1"));
    CHECK(net.edges[0].head == net.node_index("J1"));
}

TEST_CASE("parse_inp flags pump edges", "[network-io]") {
    std::string text = fixtures::minimal_inp();
    text.insert(text.find("[END]"), "[PUMPS]\nPU1 J1 J2 HEAD 1\n");
    Network net = parse_inp(text);
    REQUIRE(net.edge_count() == 3);
    CHECK(net.edges[2].kind == EdgeKind::pump);
    CHECK(net.passive_edge_count() == 2);
}

TEST_CASE("parse_inp rejects dangling endpoints", "[network-io]") {
    std::string text = fixtures::minimal_inp();
    text.insert(text.find("[END]"), "[PIPES]\nPX J1 J9 100 0.3 120\n");
    REQUIRE_THROWS_MATCHES(parse_inp(text), StructuralError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("J9")));
}

TEST_CASE("parse_inp structural and format errors", "[network-io]") {
    SECTION("duplicate node id") {
        std::string text = "[JUNCTIONS]\nJ1 1.0 0.1\nJ1 2.0 0.1\n";
        REQUIRE_THROWS_AS(parse_inp(text), StructuralError);
    }
    SECTION("duplicate edge id") {
        std::string text = fixtures::minimal_inp();
        text.insert(text.find("[END]"), "[PIPES]\nP1 J1 J2 100 0.3 120\n");
        REQUIRE_THROWS_AS(parse_inp(text), StructuralError);
    }
    SECTION("malformed number carries the line") {
        std::string text = "[JUNCTIONS]\nJ1 abc 0.1\n";
        REQUIRE_THROWS_MATCHES(parse_inp(text), ParseError,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("line 2")));
    }
    SECTION("negative junction demand violates the consumption convention") {
        std::string text = "[JUNCTIONS]\nJ1 1.0 -0.1\nJ2 1.0 0.1\n[PIPES]\nP1 J1 J2 100 0.3 120\n";
        REQUIRE_THROWS_AS(parse_inp(text), StructuralError);
    }
}

TEST_CASE("parse_inp skips unknown sections with a warning", "[network-io]") {
    std::string text = fixtures::minimal_inp();
    text.insert(text.find("[END]"), "[PATTERNS]\nPAT1 1.0 1.1\n");
    Network net = parse_inp(text);
    REQUIRE(net.warnings.size() == 1);
    CHECK(net.warnings[0].find("[PATTERNS]") != std::string::npos);
}

TEST_CASE("[DEMANDS] overrides the junction base demand", "[network-io]") {
    std::string text = fixtures::minimal_inp();
    text.insert(text.find("[END]"), "[DEMANDS]\nJ1 0.042\n");
    Network net = parse_inp(text);
    CHECK(net.nodes[net.node_index("J1")].demand == 0.042);
    CHECK(net.nodes[net.node_index("J2")].demand == 0.020);
}

TEST_CASE("synthetic generator smallest looped case", "[network-io]") {
    Network net = generate_synthetic(1, 3, 1.0);
    REQUIRE(net.node_count() == 3);
    // 2 tree edges + (capped) 1 chord: the triangle, one cycle
    REQUIRE(net.edge_count() == 3);
    CHECK(net.edge_count() - net.node_count() + component_count(net) == 1);
    CHECK(net.nodes[0].kind == NodeKind::reservoir);
}

TEST_CASE("synthetic generator seeded counts", "[network-io]") {
    Network net = generate_synthetic(7, 50, 0.4);
    REQUIRE(net.node_count() == 50);
    REQUIRE(net.edge_count() == 69);  // 49 tree edges + floor(0.4*50) chords
    CHECK(net.edge_count() - net.node_count() + component_count(net) == 20);
}

TEST_CASE("synthetic generator is deterministic", "[network-io]") {
    Network a = generate_synthetic(42, 30, 0.5);
    Network b = generate_synthetic(42, 30, 0.5);
    CHECK(serialize_network(a) == serialize_network(b));
    CHECK(a == b);
}

TEST_CASE("synthetic generator cyclomatic number property", "[network-io]") {
    for (std::uint64_t seed : {2u, 9u, 31u}) {
        for (double lf : {0.0, 0.25, 0.6}) {
            Network net = generate_synthetic(seed, 24, lf);
            const int expect = static_cast<int>(24 * lf);
            CHECK(net.edge_count() - net.node_count() + component_count(net) == expect);
        }
    }
}

TEST_CASE("network JSON round trip is structural identity", "[network-io]") {
    Network net = generate_synthetic(5, 20, 0.3);
    Network back = deserialize_network(serialize_network(net));
    CHECK(back == net);

    Network inp_net = parse_inp(fixtures::minimal_inp());
    CHECK(deserialize_network(serialize_network(inp_net)) == inp_net);
}

TEST_CASE("signal table round trip", "[network-io]") {
    SignalTable t;
    t.orientation = Orientation::edge;
    t.snapshot_id = "snap0";
    t.ids = {"e0", "e1", "e2", "e3", "e4"};
    t.values = {1.0 / 3.0, -2.5e-7, 3.14159265358979312, 0.0, 1e17};
    const std::string path = temp_path("cellflow_table_test.csv");
    write_table(t, path);
    SignalTable back = read_table(path);
    REQUIRE(back.ids == t.ids);
    REQUIRE(back.values.size() == t.values.size());
    for (size_t i = 0; i < t.values.size(); ++i) CHECK(back.values[i] == t.values[i]);
    std::remove(path.c_str());
}

TEST_CASE("signal table header mismatch", "[network-io]") {
    const std::string path = temp_path("cellflow_bad_table.csv");
    write_file(path, "name,value\nx,1\n");
    REQUIRE_THROWS_AS(read_table(path), ParseError);
    std::remove(path.c_str());
}

TEST_CASE("table for a 785-node network has 786 content lines", "[network-io]") {
    SignalTable t;
    t.orientation = Orientation::node;
    for (int i = 0; i < 785; ++i) {
        t.ids.push_back("J" + std::to_string(i));
        t.values.push_back(20.0 + 0.01 * i);
    }
    const std::string path = temp_path("cellflow_wide_table.csv");
    write_table(t, path);
    std::string text = read_file(path);
    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 786);  // header + 785 rows
    std::istringstream ss(text);
    std::string first;
    std::getline(ss, first);
    CHECK(first == "id,value");
    std::remove(path.c_str());
}

TEST_CASE("table ids must exist in the network", "[network-io]") {
    Network net = parse_inp(fixtures::minimal_inp());
    SignalTable t;
    t.orientation = Orientation::node;
    t.ids = {"J1", "nope"};
    t.values = {1.0, 2.0};
    REQUIRE_THROWS_AS(check_ids_against(t, net), StructuralError);
}
