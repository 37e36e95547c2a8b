#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "test_util.hpp"
#include "triarch/attrition.hpp"
#include "triarch/ingest.hpp"
#include "triarch/synth.hpp"

using namespace triarch;

TEST_CASE("apportion: exact totals, deterministic ties") {
    std::vector<double> w{1.0, 1.0, 1.0};
    auto c = apportion(w, 10);
    CHECK(c[0] + c[1] + c[2] == 10);
    CHECK(c[0] == 4);  // remainder ties resolve to the lower index
    CHECK(c[1] == 3);
    CHECK(c[2] == 3);

    std::vector<double> zero{0.0, 0.0};
    auto z = apportion(zero, 5);
    CHECK(z[0] == 0);
    CHECK(z[1] == 0);
}

TEST_CASE("generate: empty and zero-probability configs") {
    GeneratorConfig cfg;
    cfg.stance_nodes = {0, 0, 0};
    cfg.fan_totals = {0, 0, 0};
    Snapshot empty = generate(cfg);
    CHECK(empty.node_count() == 0);
    CHECK(empty.edge_count() == 0);

    GeneratorConfig no_edges;
    no_edges.stance_nodes = {10, 10, 10};
    no_edges.fan_totals = {100, 100, 100};
    no_edges.block_prob = {{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
    CHECK(generate(no_edges).edge_count() == 0);
}

TEST_CASE("generate: default config reproduces the reference counts") {
    GeneratorConfig cfg;
    Snapshot s = generate(cfg);
    CHECK(s.node_count() == 1356);
    auto counts = stance_counts(s);
    CHECK(counts[0].node_count == 501);   // anti
    CHECK(counts[1].node_count == 211);   // pro
    CHECK(counts[2].node_count == 644);   // neutral
    CHECK(counts[0].fan_total == 7'500'000);
    CHECK(counts[1].fan_total == 13'000'000);
    CHECK(counts[2].fan_total == 66'200'000);

    // Subcategory <=> neutral invariant holds for every generated node.
    for (const PageNode& n : s.nodes())
        CHECK(n.subcategory.has_value() == (n.stance == Stance::Neutral));
    // Coordinates come in pairs.
    for (const PageNode& n : s.nodes())
        CHECK(n.lat.has_value() == n.lon.has_value());
}

TEST_CASE("generate: deterministic per seed, distinct across seeds") {
    GeneratorConfig cfg;
    cfg.stance_nodes = {40, 30, 50};
    cfg.fan_totals = {1000, 2000, 3000};
    Snapshot a = generate(cfg);
    Snapshot b = generate(cfg);
    CHECK(a == b);

    GeneratorConfig other = cfg;
    other.seed = cfg.seed + 1;
    Snapshot c = generate(other);
    CHECK_FALSE(a == c);
}

TEST_CASE("generate: per-block edge counts match expectation within 3 sd") {
    GeneratorConfig cfg;
    cfg.stance_nodes = {80, 60, 100};
    cfg.fan_totals = {800, 600, 1000};
    cfg.block_prob = {{{0.05, 0.01, 0.02}, {0.01, 0.08, 0.015}, {0.02, 0.015, 0.03}}};

    std::array<std::array<double, 3>, 3> sum{};
    const int seeds = 12;
    for (int k = 0; k < seeds; ++k) {
        GeneratorConfig c = cfg;
        c.seed = 1000 + k;
        Snapshot s = generate(c);
        for (auto [u, v] : s.edges())
            sum[static_cast<int>(s.node(u).stance)][static_cast<int>(s.node(v).stance)] += 1.0;
    }
    const double counts[3] = {80, 60, 100};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double pairs = a == b ? counts[a] * (counts[a] - 1) : counts[a] * counts[b];
            const double p = cfg.block_prob[a][b];
            const double expected = seeds * pairs * p;
            const double sd = std::sqrt(seeds * pairs * p * (1 - p));
            INFO("block " << a << "->" << b << ": " << sum[a][b] << " vs " << expected);
            CHECK(std::abs(sum[a][b] - expected) <= 3.0 * sd + 1e-9);
        }
}

TEST_CASE("apply_removal: identity, annihilation, floor rule") {
    GeneratorConfig cfg;
    cfg.stance_nodes = {40, 30, 50};
    cfg.fan_totals = {100, 100, 100};
    Snapshot s = generate(cfg);

    Snapshot same = apply_removal(s, {0.0, 0.0, 0.0}, 5);
    CHECK(same.node_count() == s.node_count());
    CHECK(same.edge_count() == s.edge_count());

    Snapshot gone = apply_removal(s, {1.0, 1.0, 1.0}, 5);
    CHECK(gone.node_count() == 0);

    CHECK_THROWS_AS(apply_removal(s, {1.5, 0.0, 0.0}, 5), Error);
}

TEST_CASE("apply_removal: documented floor behavior on the default graph") {
    GeneratorConfig cfg;
    Snapshot s = generate(cfg);

    // Plain decimal fractions floor to 167 / 36 / 177.
    Snapshot floored = apply_removal(s, {0.335, 0.175, 0.275}, 8);
    auto c1 = stance_counts(floored);
    CHECK(501 - c1[0].node_count == 167);
    CHECK(211 - c1[1].node_count == 36);
    CHECK(644 - c1[2].node_count == 177);

    // Exact rational fractions reproduce the reference removals.
    Snapshot exact = apply_removal(s, {168.0 / 501.0, 37.0 / 211.0, 177.0 / 644.0}, 8);
    auto c2 = stance_counts(exact);
    CHECK(501 - c2[0].node_count == 168);
    CHECK(211 - c2[1].node_count == 37);
    CHECK(644 - c2[2].node_count == 177);
    CHECK(exact.node_count() == 974);
}

TEST_CASE("apply_removal: deterministic per seed and composes with diff_attrition") {
    GeneratorConfig cfg;
    cfg.stance_nodes = {60, 40, 80};
    cfg.fan_totals = {600, 400, 800};
    Snapshot s = generate(cfg);
    Snapshot r1 = apply_removal(s, {0.25, 0.1, 0.5}, 77);
    Snapshot r2 = apply_removal(s, {0.25, 0.1, 0.5}, 77);
    CHECK(r1 == r2);

    AttritionReport rep = diff_attrition(s, r1);
    CHECK(rep.per_stance[0].node_removed == 15);  // floor(0.25 * 60)
    CHECK(rep.per_stance[1].node_removed == 4);   // floor(0.1 * 40)
    CHECK(rep.per_stance[2].node_removed == 40);  // floor(0.5 * 80)
}

TEST_CASE("generate: toponym calibration yields exactly 342 local pages") {
    GeneratorConfig cfg;
    Snapshot s = generate(cfg);
    const std::filesystem::path data = TRIARCH_DATA_DIR;
    Gazetteer gaz = load_gazetteer(data / "gazetteer_default.csv");

    std::vector<std::vector<ToponymRecord>> topo;
    topo.reserve(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i)
        topo.push_back(extract_toponyms(s.node(i), gaz));
    auto part = local_global_partition(topo, s);
    CHECK(part.local_pages.size() == 342);
    CHECK(part.global_pages.size() == 1014);
}

TEST_CASE("generate: embedded toponym pool matches the shipped gazetteer") {
    const std::filesystem::path data = TRIARCH_DATA_DIR;
    Gazetteer shipped = load_gazetteer(data / "gazetteer_default.csv");
    for (const GazetteerEntry& e : default_toponym_pool().entries) {
        bool found = false;
        for (const GazetteerEntry& g : shipped.entries)
            found |= g.toponym == e.toponym && g.scale == e.scale;
        INFO("pool entry " << e.toponym);
        CHECK(found);
    }
}

TEST_CASE("generate: toponym-free titles stay toponym-free") {
    GeneratorConfig cfg;
    cfg.stance_nodes = {40, 30, 50};
    cfg.fan_totals = {100, 100, 100};
    // Force every page into the "none" bucket.
    cfg.toponym_weights = {1, 0, 0, 0, 0, 0, 0, 0, 0};
    Snapshot s = generate(cfg);
    const Gazetteer& pool = default_toponym_pool();
    for (const PageNode& n : s.nodes())
        CHECK(extract_toponyms(n, pool).empty());
}
