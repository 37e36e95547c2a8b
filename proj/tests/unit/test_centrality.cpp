#include <catch_amalgamated.hpp>

#include <algorithm>

#include "test_util.hpp"
#include "triarch/centrality.hpp"

using namespace triarch;
using test::make_snapshot;
using test::oracle_betweenness;

TEST_CASE("betweenness: undirected path a-b-c gives b=1") {
    Snapshot s = make_snapshot(
        "t", {{"a", Stance::Anti}, {"b", Stance::Pro}, {"c", Stance::Neutral}},
        {{"a", "b"}, {"b", "c"}});
    auto oracle = oracle_betweenness(s, false, false);
    auto result = betweenness(s, false, false);
    CHECK(result.score[*s.index_of("b")] == Catch::Approx(1.0).margin(1e-9));
    CHECK(result.score[*s.index_of("a")] == Catch::Approx(0.0).margin(1e-9));
    CHECK(result.score[*s.index_of("c")] == Catch::Approx(0.0).margin(1e-9));
    for (std::size_t i = 0; i < result.score.size(); ++i)
        CHECK(result.score[i] == Catch::Approx(oracle[i]).margin(1e-9));
}

TEST_CASE("betweenness: undirected star, center scores 3") {
    Snapshot s = make_snapshot("t",
                               {{"c", Stance::Anti},
                                {"l1", Stance::Pro},
                                {"l2", Stance::Pro},
                                {"l3", Stance::Pro}},
                               {{"c", "l1"}, {"c", "l2"}, {"c", "l3"}});
    auto oracle = oracle_betweenness(s, false, false);
    CHECK(oracle[*s.index_of("c")] == Catch::Approx(3.0));  // 3 leaf pairs
    auto result = betweenness(s, false, false);
    CHECK(result.score[*s.index_of("c")] == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("betweenness: empty and single-node graphs are all zero") {
    CHECK(betweenness(build_snapshot("e", {}, {})).score.empty());
    Snapshot one = make_snapshot("o", {{"a", Stance::Anti}}, {});
    auto r = betweenness(one);
    REQUIRE(r.score.size() == 1);
    CHECK(r.score[0] == 0.0);
}

TEST_CASE("betweenness: directed path counts ordered pairs") {
    Snapshot s = make_snapshot(
        "t", {{"a", Stance::Anti}, {"b", Stance::Pro}, {"c", Stance::Neutral}},
        {{"a", "b"}, {"b", "c"}});
    auto r = betweenness(s, true, false);
    CHECK(r.score[*s.index_of("b")] == Catch::Approx(1.0).margin(1e-9));  // only a->c
}

TEST_CASE("betweenness: matches brute force on random graphs") {
    Rng rng(2024);
    for (int iter = 0; iter < 60; ++iter) {
        Snapshot s = test::random_snapshot(rng, 10, 0.3);
        for (bool directed : {true, false}) {
            for (bool normalized : {false, true}) {
                auto expect = oracle_betweenness(s, directed, normalized);
                auto got = betweenness(s, directed, normalized);
                REQUIRE(got.score.size() == expect.size());
                for (std::size_t i = 0; i < expect.size(); ++i)
                    CHECK(got.score[i] == Catch::Approx(expect[i]).margin(1e-9));
            }
        }
    }
}

TEST_CASE("betweenness: identical across thread counts") {
    Rng rng(5);
    Snapshot s = test::random_snapshot(rng, 40, 0.15);
    auto one = betweenness(s, true, false, 1);
    auto four = betweenness(s, true, false, 4);
    REQUIRE(one.score.size() == four.score.size());
    for (std::size_t i = 0; i < one.score.size(); ++i)
        CHECK(one.score[i] == four.score[i]);  // bit-identical
}

TEST_CASE("betweenness: relabeling permutes scores identically") {
    Rng rng(17);
    Snapshot s = test::random_snapshot(rng, 10, 0.35);
    // Relabel by prefixing ids so the sorted order changes.
    std::vector<PageNode> renamed = s.nodes();
    auto rename = [](const std::string& id) { return "zz-" + id; };
    for (auto& n : renamed) n.id = rename(n.id);
    std::vector<FollowEdge> edges;
    for (const FollowEdge& e : s.follow_edges())
        edges.push_back({rename(e.source), rename(e.target)});
    Snapshot t = build_snapshot("relabel", std::move(renamed), edges);

    auto rs = betweenness(s, true, false);
    auto rt = betweenness(t, true, false);
    for (NodeIndex i = 0; i < s.node_count(); ++i) {
        const auto j = t.index_of(rename(s.node(i).id));
        REQUIRE(j.has_value());
        CHECK(rs.score[i] == Catch::Approx(rt.score[*j]).margin(1e-12));
    }
}

TEST_CASE("betweenness: pendant leaf never lowers the host's score") {
    Rng rng(23);
    for (int iter = 0; iter < 15; ++iter) {
        Snapshot s = test::random_snapshot(rng, 9, 0.3);
        if (s.node_count() == 0) continue;
        const NodeIndex host = static_cast<NodeIndex>(rng.next_below(s.node_count()));
        auto before = betweenness(s, false, false).score[host];

        std::vector<PageNode> nodes = s.nodes();
        PageNode leaf;
        leaf.id = "zzz-leaf";
        leaf.stance = Stance::Pro;
        nodes.push_back(leaf);
        auto edges = s.follow_edges();
        edges.push_back({s.node(host).id, "zzz-leaf"});
        Snapshot grown = build_snapshot("grown", std::move(nodes), edges);

        auto after = betweenness(grown, false, false).score[*grown.index_of(s.node(host).id)];
        CHECK(after >= before - 1e-9);
    }
}

TEST_CASE("size_scale: affine endpoints and degenerate range") {
    std::vector<double> two{0.0, 10.0};
    auto r = size_scale(two, 4.0, 40.0);
    CHECK(r[0] == Catch::Approx(4.0));
    CHECK(r[1] == Catch::Approx(40.0));

    std::vector<double> same{5.0, 5.0, 5.0};
    for (double v : size_scale(same, 4.0, 40.0)) CHECK(v == 4.0);

    std::vector<double> three{0.0, 5.0, 10.0};
    CHECK(size_scale(three, 4.0, 40.0)[1] == Catch::Approx(22.0));

    CHECK_THROWS_AS(size_scale(three, 40.0, 4.0), Error);
    CHECK_THROWS_AS(size_scale(three, 0.0, 4.0), Error);
}
