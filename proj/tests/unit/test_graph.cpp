#include <catch_amalgamated.hpp>

#include "test_util.hpp"
#include "triarch/graph.hpp"

using namespace triarch;
using test::make_node;
using test::make_snapshot;

TEST_CASE("build_snapshot: empty") {
    Snapshot s = build_snapshot("empty", {}, {});
    CHECK(s.node_count() == 0);
    CHECK(s.edge_count() == 0);
}

TEST_CASE("build_snapshot: duplicate edges collapse") {
    Snapshot s = make_snapshot("t", {{"a", Stance::Anti}, {"b", Stance::Pro}},
                               {{"a", "b"}, {"a", "b"}});
    CHECK(s.edge_count() == 1);
}

TEST_CASE("build_snapshot: dangling edge rejected") {
    std::vector<PageNode> nodes{make_node("a", Stance::Anti)};
    std::vector<FollowEdge> edges{{"a", "b"}};
    try {
        build_snapshot("t", nodes, edges);
        FAIL("expected DanglingEdge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DanglingEdge);
    }
}

TEST_CASE("build_snapshot: self loop rejected") {
    std::vector<PageNode> nodes{make_node("a", Stance::Anti)};
    std::vector<FollowEdge> edges{{"a", "a"}};
    try {
        build_snapshot("t", nodes, edges);
        FAIL("expected SelfLoop");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SelfLoop);
    }
}

TEST_CASE("build_snapshot: duplicate node ids rejected") {
    std::vector<PageNode> nodes{make_node("a", Stance::Anti), make_node("a", Stance::Pro)};
    try {
        build_snapshot("t", nodes, {});
        FAIL("expected DuplicateNodeId");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DuplicateNodeId);
    }
}

TEST_CASE("build_snapshot is idempotent on its own output") {
    Rng rng(42);
    for (int i = 0; i < 30; ++i) {
        Snapshot s = test::random_snapshot(rng);
        Snapshot rebuilt = build_snapshot(s.label(), s.nodes(), s.follow_edges());
        CHECK(s == rebuilt);
    }
}

TEST_CASE("degree_stats: single edge") {
    Snapshot s = make_snapshot("t", {{"a", Stance::Anti}, {"b", Stance::Pro}}, {{"a", "b"}});
    auto d = degree_stats(s);
    const auto a = *s.index_of("a");
    const auto b = *s.index_of("b");
    CHECK(d[a].in == 0);
    CHECK(d[a].out == 1);
    CHECK(d[a].total == 1);
    CHECK(d[b].in == 1);
    CHECK(d[b].out == 0);
    CHECK(d[b].total == 1);
}

TEST_CASE("degree_stats: empty graph") {
    Snapshot s = build_snapshot("t", {}, {});
    CHECK(degree_stats(s).empty());
}

TEST_CASE("degree_stats: directed triangle (hand enumeration)") {
    Snapshot s = make_snapshot(
        "t", {{"a", Stance::Anti}, {"b", Stance::Pro}, {"c", Stance::Neutral}},
        {{"a", "b"}, {"b", "c"}, {"c", "a"}});
    for (auto d : degree_stats(s)) {
        CHECK(d.in == 1);
        CHECK(d.out == 1);
        CHECK(d.total == 2);
    }
}

TEST_CASE("stance_counts: direct sum") {
    std::vector<PageNode> nodes{make_node("a", Stance::Anti, 3),
                                make_node("b", Stance::Anti, 4)};
    Snapshot s = build_snapshot("t", nodes, {});
    auto counts = stance_counts(s);
    CHECK(counts[static_cast<int>(Stance::Anti)].node_count == 2);
    CHECK(counts[static_cast<int>(Stance::Anti)].fan_total == 7);
    CHECK(counts[static_cast<int>(Stance::Pro)].node_count == 0);
    CHECK(counts[static_cast<int>(Stance::Neutral)].node_count == 0);
}

TEST_CASE("stance_counts: empty snapshot") {
    Snapshot s = build_snapshot("t", {}, {});
    for (auto t : stance_counts(s)) {
        CHECK(t.node_count == 0);
        CHECK(t.fan_total == 0);
    }
}

TEST_CASE("stance counts partition nodes; degree sums match edge count") {
    Rng rng(7);
    for (int i = 0; i < 40; ++i) {
        Snapshot s = test::random_snapshot(rng);
        auto counts = stance_counts(s);
        std::size_t total = 0;
        for (auto t : counts) total += t.node_count;
        CHECK(total == s.node_count());

        std::uint64_t in_sum = 0, out_sum = 0;
        for (auto d : degree_stats(s)) {
            in_sum += d.in;
            out_sum += d.out;
        }
        CHECK(in_sum == s.edge_count());
        CHECK(out_sum == s.edge_count());
    }
}

TEST_CASE("undirected neighbors deduplicate reciprocal edges") {
    Snapshot s = make_snapshot("t", {{"a", Stance::Anti}, {"b", Stance::Pro}},
                               {{"a", "b"}, {"b", "a"}});
    const auto a = *s.index_of("a");
    CHECK(s.undirected_degree(a) == 1);
    CHECK(s.in_degree(a) == 1);
    CHECK(s.out_degree(a) == 1);
}
