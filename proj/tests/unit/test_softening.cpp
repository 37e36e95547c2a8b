#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "test_util.hpp"
#include "triarch/softening.hpp"
#include "triarch/synth.hpp"

using namespace triarch;
using test::make_snapshot;

namespace {

// Complete graph with the given stance multiset, ids k00, k01, ...
Snapshot complete_graph(std::vector<Stance> stances) {
    std::vector<std::pair<std::string, Stance>> nodes;
    for (std::size_t i = 0; i < stances.size(); ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "k%02zu", i);
        nodes.emplace_back(id, stances[i]);
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < stances.size(); ++i)
        for (std::size_t j = 0; j < stances.size(); ++j)
            if (i != j) edges.emplace_back(nodes[i].first, nodes[j].first);
    return make_snapshot("complete", std::move(nodes), std::move(edges));
}

std::vector<Stance> stances(std::size_t anti, std::size_t pro, std::size_t neutral) {
    std::vector<Stance> out;
    out.insert(out.end(), anti, Stance::Anti);
    out.insert(out.end(), pro, Stance::Pro);
    out.insert(out.end(), neutral, Stance::Neutral);
    return out;
}

}  // namespace

TEST_CASE("draw_circle: isolated seed yields a singleton") {
    Snapshot s = make_snapshot("t", {{"only", Stance::Anti}}, {});
    Rng rng(1);
    auto circle = draw_circle(s, rng, 6);
    REQUIRE(circle.size() == 1);
    CHECK(s.node(circle[0]).id == "only");
}

TEST_CASE("draw_circle: members come from the seed's closed neighborhood") {
    Rng graph_rng(12);
    Snapshot s = test::random_snapshot(graph_rng, 14, 0.25);
    if (s.node_count() == 0) return;
    Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        auto circle = draw_circle(s, rng, 4);
        REQUIRE(!circle.empty());
        const NodeIndex seed = circle[0];
        auto hood = s.undirected_neighbors(seed);
        std::set<NodeIndex> allowed(hood.begin(), hood.end());
        allowed.insert(seed);
        std::set<NodeIndex> distinct(circle.begin(), circle.end());
        CHECK(distinct.size() == circle.size());  // no repeats
        for (NodeIndex m : circle) CHECK(allowed.count(m) == 1);
        // Truncation rule: a small neighborhood is taken whole.
        if (hood.size() <= 3)
            CHECK(circle.size() == hood.size() + 1);
        else
            CHECK(circle.size() == 4);
    }
}

TEST_CASE("draw_circle: star center takes exactly size-1 distinct leaves") {
    Snapshot s = make_snapshot("t",
                               {{"c", Stance::Anti},
                                {"l1", Stance::Pro},
                                {"l2", Stance::Pro},
                                {"l3", Stance::Pro},
                                {"l4", Stance::Pro}},
                               {{"c", "l1"}, {"c", "l2"}, {"c", "l3"}, {"c", "l4"}});
    Rng rng(3);
    const NodeIndex center = *s.index_of("c");
    for (int iter = 0; iter < 100; ++iter) {
        auto circle = draw_circle(s, rng, 3);
        if (circle[0] != center) continue;
        CHECK(circle.size() == 3);
        std::set<NodeIndex> distinct(circle.begin(), circle.end());
        CHECK(distinct.size() == 3);
    }
}

TEST_CASE("is_mixed: definitions") {
    Snapshot s = complete_graph(stances(1, 1, 1));
    StanceState state = initial_state(s);
    // ids sort k00(anti) k01(pro) k02(neutral)
    std::vector<NodeIndex> anti_pro{0, 1};
    std::vector<NodeIndex> anti_anti{0, 0};
    std::vector<NodeIndex> anti_neutral{0, 2};

    CHECK(is_mixed(anti_pro, state));
    CHECK_FALSE(is_mixed(anti_anti, state));
    CHECK(is_mixed(anti_neutral, state));  // neutral counts toward mixedness

    CHECK(is_mixed(anti_pro, state, MixedRule::AntiAndProRequired));
    CHECK_FALSE(is_mixed(anti_neutral, state, MixedRule::AntiAndProRequired));
}

TEST_CASE("simulate_step: forced conversions on a two-node graph") {
    Snapshot s = make_snapshot("t", {{"a", Stance::Anti}, {"p", Stance::Pro}},
                               {{"a", "p"}});
    SofteningConfig cfg;
    cfg.circle_size = 2;
    cfg.circles_per_step = 1;
    cfg.conversion_probability = 1.0;

    StanceState avg = initial_state(s);
    Rng rng(5);
    simulate_step(s, avg, cfg, rng);
    CHECK(avg.stance[*s.index_of("a")] == Stance::Neutral);
    CHECK(avg.stance[*s.index_of("p")] == Stance::Neutral);

    cfg.scenario = Scenario::BetterCase;
    StanceState better = initial_state(s);
    Rng rng2(5);
    simulate_step(s, better, cfg, rng2);
    CHECK(better.stance[*s.index_of("a")] == Stance::Neutral);
    CHECK(better.stance[*s.index_of("p")] == Stance::Pro);
}

TEST_CASE("simulate_step: all-neutral state is a fixed point") {
    Snapshot s = complete_graph(stances(0, 0, 8));
    SofteningConfig cfg;
    StanceState state = initial_state(s);
    Rng rng(9);
    for (int step = 0; step < 10; ++step) simulate_step(s, state, cfg, rng);
    for (Stance st : state.stance) CHECK(st == Stance::Neutral);
}

TEST_CASE("run_ensemble: p_c = 0 freezes counts and censors milestones") {
    Snapshot s = complete_graph(stances(4, 4, 4));
    SofteningConfig cfg;
    cfg.conversion_probability = 0.0;
    cfg.run_count = 10;
    cfg.max_steps = 20;
    auto res = run_ensemble(s, cfg);
    for (std::size_t t = 0; t <= 20; ++t) {
        CHECK(res.mean[t][0] == 4.0);
        CHECK(res.mean[t][1] == 4.0);
        CHECK(res.sd[t][0] == 0.0);
    }
    CHECK(res.half_anti.censored_runs == 10);
    CHECK(res.full_neutral.censored_runs == 10);
}

TEST_CASE("run_ensemble: whole-graph circles saturate at step one") {
    Snapshot s = complete_graph(stances(5, 5, 0));
    SofteningConfig cfg;
    cfg.circle_size = 10;  // circle = everyone
    cfg.run_count = 20;
    cfg.max_steps = 5;
    auto res = run_ensemble(s, cfg);
    CHECK(res.mean[0][0] == 5.0);
    CHECK(res.mean[1][0] == 0.0);
    CHECK(res.mean[1][1] == 0.0);
    CHECK(res.mean[1][2] == 10.0);
    CHECK(res.full_neutral.censored_runs == 0);
    CHECK(res.full_neutral.mean_step == 1.0);
    CHECK(res.full_neutral.sd_step == 0.0);
}

TEST_CASE("run_ensemble: invariants hold on the synthetic network") {
    GeneratorConfig gen;
    gen.stance_nodes = {60, 40, 80};
    gen.fan_totals = {600, 400, 800};
    Snapshot s = generate(gen);
    SofteningConfig cfg;
    cfg.run_count = 40;
    cfg.max_steps = 60;
    cfg.conversion_probability = 0.8;
    auto res = run_ensemble(s, cfg);

    const auto init = stance_counts(s);
    for (const RunTrajectory& run : res.runs) {
        REQUIRE(run.counts.size() == cfg.max_steps + 1);
        CHECK(run.counts[0].anti == init[0].node_count);
        CHECK(run.counts[0].pro == init[1].node_count);
        for (std::size_t t = 0; t + 1 < run.counts.size(); ++t) {
            // Monotone non-increasing anti/pro; conservation.
            CHECK(run.counts[t + 1].anti <= run.counts[t].anti);
            CHECK(run.counts[t + 1].pro <= run.counts[t].pro);
            CHECK(run.counts[t].anti + run.counts[t].pro + run.counts[t].neutral ==
                  s.node_count());
        }
    }
}

TEST_CASE("run_ensemble: BetterCase keeps pro counts constant") {
    GeneratorConfig gen;
    gen.stance_nodes = {50, 30, 60};
    gen.fan_totals = {500, 300, 600};
    Snapshot s = generate(gen);
    SofteningConfig cfg;
    cfg.scenario = Scenario::BetterCase;
    cfg.run_count = 25;
    cfg.max_steps = 40;
    auto res = run_ensemble(s, cfg);
    for (const RunTrajectory& run : res.runs)
        for (const StepCounts& c : run.counts) CHECK(c.pro == 30);
}

TEST_CASE("run_ensemble: bit-identical across reruns and thread counts") {
    GeneratorConfig gen;
    gen.stance_nodes = {30, 20, 30};
    gen.fan_totals = {300, 200, 300};
    Snapshot s = generate(gen);
    SofteningConfig cfg;
    cfg.run_count = 30;
    cfg.max_steps = 30;
    cfg.master_seed = 424242;
    cfg.conversion_probability = 0.35;
    auto a = run_ensemble(s, cfg);
    auto b = run_ensemble(s, cfg);
    SofteningConfig threaded = cfg;
    threaded.threads = 3;
    auto c = run_ensemble(s, threaded);

    for (std::size_t t = 0; t <= cfg.max_steps; ++t)
        for (int k = 0; k < 3; ++k) {
            CHECK(a.mean[t][k] == b.mean[t][k]);
            CHECK(a.sd[t][k] == b.sd[t][k]);
            CHECK(a.mean[t][k] == c.mean[t][k]);
            CHECK(a.sd[t][k] == c.sd[t][k]);
        }
    CHECK(a.half_anti.mean_step == c.half_anti.mean_step);
    CHECK(a.full_neutral.mean_step == c.full_neutral.mean_step);
}

TEST_CASE("run_ensemble: geometric decay matches the closed form on a guarded complete graph") {
    // 8 anti + 16 neutral on K_24 with circle_size 10: any circle containing
    // an anti node must also contain a non-anti node (only 7 other antis
    // exist), so every such circle is mixed and the per-step conversion
    // probability is exactly q = 1 - (1 - p_c * s/n)^C.
    Snapshot s = complete_graph(stances(8, 0, 16));
    SofteningConfig cfg;
    cfg.circle_size = 10;
    cfg.circles_per_step = 3;
    cfg.conversion_probability = 0.2;
    cfg.run_count = 400;
    cfg.max_steps = 12;
    cfg.master_seed = 20250601;
    auto res = run_ensemble(s, cfg);

    const double q = 1.0 - std::pow(1.0 - 0.2 * 10.0 / 24.0, 3.0);
    for (std::size_t t = 0; t <= cfg.max_steps; ++t) {
        const double expected = 8.0 * std::pow(1.0 - q, static_cast<double>(t));
        const double sd_of_mean = res.sd[t][0] / std::sqrt(400.0) + 1e-9;
        INFO("step " << t << " mean " << res.mean[t][0] << " expected " << expected);
        CHECK(std::abs(res.mean[t][0] - expected) <= 3.0 * sd_of_mean + 0.02);
    }
}

TEST_CASE("run_ensemble: agrees with the naive independent simulator") {
    GeneratorConfig gen;
    gen.stance_nodes = {40, 30, 50};
    gen.fan_totals = {400, 300, 500};
    Snapshot s = generate(gen);

    SofteningConfig cfg;
    cfg.run_count = 300;
    cfg.max_steps = 15;
    cfg.conversion_probability = 0.5;
    cfg.master_seed = 777;
    auto res = run_ensemble(s, cfg);

    test::NaiveSofteningParams np;
    np.conversion_probability = 0.5;
    np.max_steps = 15;
    auto naive = test::naive_softening_means(s, np, 31337, 300);

    for (std::size_t t = 0; t <= 15; ++t) {
        for (int k = 0; k < 2; ++k) {  // anti and pro means
            const double sd_of_mean = res.sd[t][k] / std::sqrt(300.0);
            const double tol = 3.0 * std::sqrt(2.0) * sd_of_mean + 0.05;
            INFO("step " << t << " channel " << k << ": " << res.mean[t][k] << " vs "
                         << naive[t][k]);
            CHECK(std::abs(res.mean[t][k] - naive[t][k]) <= tol);
        }
    }
}

TEST_CASE("run_ensemble: sd of the mean shrinks like 1/sqrt(R)") {
    GeneratorConfig gen;
    gen.stance_nodes = {40, 25, 40};
    gen.fan_totals = {400, 250, 400};
    Snapshot s = generate(gen);
    SofteningConfig cfg;
    cfg.conversion_probability = 0.15;
    cfg.max_steps = 12;
    cfg.master_seed = 8080;

    auto sd_at = [&](std::uint32_t runs, std::size_t step) {
        SofteningConfig c = cfg;
        c.run_count = runs;
        auto res = run_ensemble(s, c);
        return res.sd[step][0] / std::sqrt(static_cast<double>(runs));
    };
    // Compare at a mid-decay step where variance is substantial.
    const double s100 = sd_at(100, 4);
    const double s400 = sd_at(400, 4);
    const double s1600 = sd_at(1600, 4);
    INFO("sd of mean: " << s100 << " " << s400 << " " << s1600);
    CHECK(s100 / s400 == Catch::Approx(2.0).epsilon(0.25));
    CHECK(s100 / s1600 == Catch::Approx(4.0).epsilon(0.2));
}

TEST_CASE("snapshot_states: recorded run renders to stance-labeled snapshots") {
    Snapshot s = complete_graph(stances(4, 4, 2));
    SofteningConfig cfg;
    cfg.run_count = 3;
    cfg.max_steps = 10;
    cfg.record_states = true;
    auto res = run_ensemble(s, cfg);

    std::vector<std::uint32_t> steps{0, 3, 10'000};
    auto snaps = snapshot_states(s, res, steps);
    REQUIRE(snaps.size() == 3);

    // Step 0 is the initial stance assignment exactly.
    auto init = stance_counts(snaps[0]);
    CHECK(init[0].node_count == 4);
    CHECK(init[1].node_count == 4);

    // Beyond termination: the final absorbed state.
    auto last = stance_counts(snaps[2]);
    CHECK(last[0].node_count == res.runs[0].counts[cfg.max_steps].anti);
    CHECK(last[1].node_count == res.runs[0].counts[cfg.max_steps].pro);

    // Milestone consistency on the recorded run.
    if (res.runs[0].half_anti_step) {
        auto mid = snapshot_states(s, res, std::vector<std::uint32_t>{*res.runs[0].half_anti_step});
        auto counts = stance_counts(mid[0]);
        CHECK(counts[0].node_count * 2 <= 4);
    }

    SofteningConfig no_rec = cfg;
    no_rec.record_states = false;
    auto res2 = run_ensemble(s, no_rec);
    CHECK_THROWS_AS(snapshot_states(s, res2, steps), Error);
}

TEST_CASE("run_ensemble: strict mixed rule blocks anti+neutral circles") {
    // Anti and neutral only: under the strict rule nothing can ever convert.
    Snapshot s = complete_graph(stances(6, 0, 6));
    SofteningConfig cfg;
    cfg.mixed_rule = MixedRule::AntiAndProRequired;
    cfg.run_count = 10;
    cfg.max_steps = 15;
    auto res = run_ensemble(s, cfg);
    CHECK(res.mean[15][0] == 6.0);

    cfg.mixed_rule = MixedRule::AnyTwoDistinct;
    auto res2 = run_ensemble(s, cfg);
    CHECK(res2.mean[15][0] < 6.0);
}
