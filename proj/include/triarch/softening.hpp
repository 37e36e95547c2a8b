#pragma once
// The mixed-circle "softening" agent-based model: each step draws a batch of
// small circles from nodes' closed undirected neighborhoods; in every circle
// whose members currently hold at least two distinct stances, eligible
// members convert to Neutral with probability p_c. Neutral is absorbing.
// Ensembles run many independent seeded replicates and aggregate mean/sd
// trajectories plus conversion milestones.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triarch/error.hpp"
#include "triarch/graph.hpp"
#include "triarch/rng.hpp"
#include "triarch/threads.hpp"

namespace triarch {

enum class Scenario : std::uint8_t {
    AverageCase = 0,  // anti and pro are both eligible to soften
    BetterCase = 1,   // anti only
};

inline const char* to_string(Scenario s) {
    return s == Scenario::AverageCase ? "average_case" : "better_case";
}

inline std::optional<Scenario> parse_scenario(std::string_view text) {
    if (text == "average_case" || text == "average") return Scenario::AverageCase;
    if (text == "better_case" || text == "better") return Scenario::BetterCase;
    return std::nullopt;
}

// What counts as a mixed circle. AnyTwoDistinct is the default reading
// (anti + neutral converts); AntiAndProRequired is the stricter variant.
enum class MixedRule : std::uint8_t { AnyTwoDistinct = 0, AntiAndProRequired = 1 };

inline const char* to_string(MixedRule r) {
    return r == MixedRule::AnyTwoDistinct ? "any_two_distinct" : "anti_and_pro_required";
}

inline std::optional<MixedRule> parse_mixed_rule(std::string_view text) {
    if (text == "any_two_distinct") return MixedRule::AnyTwoDistinct;
    if (text == "anti_and_pro_required") return MixedRule::AntiAndProRequired;
    return std::nullopt;
}

struct SofteningConfig {
    std::uint32_t circle_size = 6;       // s >= 2
    std::uint32_t circles_per_step = 0;  // 0 = ceil(n / circle_size)
    double conversion_probability = 1.0;
    Scenario scenario = Scenario::AverageCase;
    MixedRule mixed_rule = MixedRule::AnyTwoDistinct;
    std::uint32_t max_steps = 500;
    std::uint32_t run_count = 1000;
    std::uint64_t master_seed = 1356;
    double hours_per_step = 1.0;  // reporting metadata only
    bool record_states = false;   // keep per-step stances of run 0 for rendering
    unsigned threads = 0;

    std::uint32_t effective_circles(std::size_t node_count) const {
        if (circles_per_step > 0) return circles_per_step;
        if (node_count == 0) return 0;
        return static_cast<std::uint32_t>((node_count + circle_size - 1) / circle_size);
    }

    void validate() const {
        if (circle_size < 2) throw Error(ErrorKind::BadArgs, "circle_size must be >= 2");
        if (conversion_probability < 0.0 || conversion_probability > 1.0)
            throw Error(ErrorKind::BadArgs, "conversion_probability must be in [0,1]");
        if (run_count < 1) throw Error(ErrorKind::BadArgs, "run_count must be >= 1");
    }
};

// Mutable stance assignment within one run; the node set never changes.
struct StanceState {
    std::vector<Stance> stance;  // aligned to snapshot node order
    std::uint32_t step = 0;
};

inline StanceState initial_state(const Snapshot& s) {
    StanceState state;
    state.stance.reserve(s.node_count());
    for (const PageNode& n : s.nodes()) state.stance.push_back(n.stance);
    return state;
}

inline bool is_eligible(Stance s, Scenario scenario) {
    if (s == Stance::Neutral) return false;
    if (scenario == Scenario::BetterCase) return s == Stance::Anti;
    return true;
}

// Seed node uniform over all nodes; members are the seed plus up to
// (circle_size - 1) nodes drawn uniformly without replacement from the
// seed's undirected neighborhood (the whole neighborhood when smaller).
inline std::vector<NodeIndex> draw_circle(const Snapshot& s, Rng& rng,
                                          std::uint32_t circle_size) {
    const std::size_t n = s.node_count();
    const NodeIndex seed = static_cast<NodeIndex>(rng.next_below(n));
    auto neighborhood = s.undirected_neighbors(seed);
    std::vector<NodeIndex> circle{seed};
    if (neighborhood.empty() || circle_size < 2) return circle;
    if (neighborhood.size() <= circle_size - 1) {
        circle.insert(circle.end(), neighborhood.begin(), neighborhood.end());
        return circle;
    }
    std::vector<NodeIndex> pool(neighborhood.begin(), neighborhood.end());
    rng.partial_shuffle(pool, circle_size - 1);
    circle.insert(circle.end(), pool.begin(), pool.begin() + (circle_size - 1));
    return circle;
}

inline bool is_mixed(std::span<const NodeIndex> circle, const StanceState& state,
                     MixedRule rule = MixedRule::AnyTwoDistinct) {
    bool seen[3] = {false, false, false};
    for (NodeIndex i : circle) seen[static_cast<std::size_t>(state.stance[i])] = true;
    if (rule == MixedRule::AntiAndProRequired)
        return seen[static_cast<std::size_t>(Stance::Anti)] &&
               seen[static_cast<std::size_t>(Stance::Pro)];
    return (seen[0] + seen[1] + seen[2]) >= 2;
}

// One deliberation round: C circles, conversions collected against the
// start-of-step stances and applied together at the end. A node sitting in
// several circles converts if any of them triggers.
inline void simulate_step(const Snapshot& s, StanceState& state,
                          const SofteningConfig& config, Rng& rng) {
    const std::uint32_t circles = config.effective_circles(s.node_count());
    std::vector<bool> convert(state.stance.size(), false);
    for (std::uint32_t c = 0; c < circles; ++c) {
        const auto circle = draw_circle(s, rng, config.circle_size);
        if (!is_mixed(circle, state, config.mixed_rule)) continue;
        for (NodeIndex member : circle) {
            if (!is_eligible(state.stance[member], config.scenario)) continue;
            if (rng.bernoulli(config.conversion_probability)) convert[member] = true;
        }
    }
    for (std::size_t i = 0; i < convert.size(); ++i)
        if (convert[i]) state.stance[i] = Stance::Neutral;
    ++state.step;
}

struct StepCounts {
    std::uint32_t anti = 0;
    std::uint32_t pro = 0;
    std::uint32_t neutral = 0;
};

inline StepCounts tally(const StanceState& state) {
    StepCounts c;
    for (Stance s : state.stance) {
        if (s == Stance::Anti) ++c.anti;
        else if (s == Stance::Pro) ++c.pro;
        else ++c.neutral;
    }
    return c;
}

struct Milestone {
    double mean_step = 0.0;
    double sd_step = 0.0;
    std::uint32_t censored_runs = 0;  // runs that never reached the milestone
};

struct RunTrajectory {
    std::vector<StepCounts> counts;  // index = step, 0 .. max_steps
    std::optional<std::uint32_t> half_anti_step;
    std::optional<std::uint32_t> half_pro_step;
    std::optional<std::uint32_t> full_neutral_step;
};

struct SofteningResult {
    SofteningConfig config;
    std::size_t node_count = 0;
    // Ensemble statistics per step, 0 .. max_steps.
    std::vector<std::array<double, 3>> mean;  // anti, pro, neutral
    std::vector<std::array<double, 3>> sd;
    Milestone half_anti;
    Milestone half_pro;
    Milestone full_neutral;
    std::vector<RunTrajectory> runs;              // raw trajectories (always kept)
    std::vector<std::vector<Stance>> run0_states;  // per step, when record_states
};

namespace detail {

inline RunTrajectory simulate_run(const Snapshot& s, const SofteningConfig& config,
                                  std::uint64_t run_seed,
                                  std::vector<std::vector<Stance>>* state_log) {
    Rng rng(run_seed);
    StanceState state = initial_state(s);
    RunTrajectory traj;
    traj.counts.reserve(config.max_steps + 1);
    StepCounts counts = tally(state);
    traj.counts.push_back(counts);
    if (state_log) state_log->push_back(state.stance);

    const std::uint32_t anti0 = counts.anti;
    const std::uint32_t pro0 = counts.pro;
    auto check_milestones = [&](std::uint32_t step) {
        if (!traj.half_anti_step && counts.anti * 2 <= anti0) traj.half_anti_step = step;
        if (!traj.half_pro_step && counts.pro * 2 <= pro0) traj.half_pro_step = step;
        const std::uint32_t eligible = config.scenario == Scenario::BetterCase
                                           ? counts.anti
                                           : counts.anti + counts.pro;
        if (!traj.full_neutral_step && eligible == 0) traj.full_neutral_step = step;
    };
    check_milestones(0);

    for (std::uint32_t step = 1; step <= config.max_steps; ++step) {
        if (traj.full_neutral_step) {
            // Absorbed: counts stay constant for the rest of the horizon.
            traj.counts.resize(config.max_steps + 1, counts);
            if (state_log) state_log->resize(config.max_steps + 1, state.stance);
            break;
        }
        simulate_step(s, state, config, rng);
        counts = tally(state);
        traj.counts.push_back(counts);
        if (state_log) state_log->push_back(state.stance);
        check_milestones(step);
    }
    return traj;
}

inline Milestone aggregate_milestone(const std::vector<RunTrajectory>& runs,
                                     std::optional<std::uint32_t> RunTrajectory::*field) {
    Milestone m;
    double sum = 0.0;
    std::size_t hit = 0;
    for (const RunTrajectory& r : runs) {
        if (r.*field) {
            sum += static_cast<double>(*(r.*field));
            ++hit;
        } else {
            ++m.censored_runs;
        }
    }
    if (hit == 0) return m;
    m.mean_step = sum / static_cast<double>(hit);
    if (hit > 1) {
        double ss = 0.0;
        for (const RunTrajectory& r : runs)
            if (r.*field) {
                const double d = static_cast<double>(*(r.*field)) - m.mean_step;
                ss += d * d;
            }
        m.sd_step = std::sqrt(ss / static_cast<double>(hit - 1));
    }
    return m;
}

}  // namespace detail

// R independent runs; run i is seeded from (master_seed, i). Aggregation is
// performed in run order, so the result is bit-identical for any thread
// count or execution order.
inline SofteningResult run_ensemble(const Snapshot& s, const SofteningConfig& config) {
    config.validate();
    SofteningResult result;
    result.config = config;
    result.node_count = s.node_count();
    result.runs.resize(config.run_count);
    if (config.record_states) result.run0_states.reserve(config.max_steps + 1);

    const unsigned workers = resolve_threads(config.threads);
    parallel_blocks(config.run_count, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            auto* log = (config.record_states && i == 0) ? &result.run0_states : nullptr;
            result.runs[i] =
                detail::simulate_run(s, config, derive_seed(config.master_seed, i), log);
        }
    });

    const std::size_t steps = config.max_steps + 1;
    result.mean.assign(steps, {});
    result.sd.assign(steps, {});
    const double r_count = static_cast<double>(config.run_count);
    for (std::size_t t = 0; t < steps; ++t) {
        std::array<double, 3> sum{};
        for (const RunTrajectory& r : result.runs) {
            sum[0] += r.counts[t].anti;
            sum[1] += r.counts[t].pro;
            sum[2] += r.counts[t].neutral;
        }
        for (int k = 0; k < 3; ++k) result.mean[t][k] = sum[k] / r_count;
        if (config.run_count > 1) {
            std::array<double, 3> ss{};
            for (const RunTrajectory& r : result.runs) {
                const double d0 = r.counts[t].anti - result.mean[t][0];
                const double d1 = r.counts[t].pro - result.mean[t][1];
                const double d2 = r.counts[t].neutral - result.mean[t][2];
                ss[0] += d0 * d0;
                ss[1] += d1 * d1;
                ss[2] += d2 * d2;
            }
            for (int k = 0; k < 3; ++k) result.sd[t][k] = std::sqrt(ss[k] / (r_count - 1.0));
        }
    }
    result.half_anti = detail::aggregate_milestone(result.runs, &RunTrajectory::half_anti_step);
    result.half_pro = detail::aggregate_milestone(result.runs, &RunTrajectory::half_pro_step);
    result.full_neutral =
        detail::aggregate_milestone(result.runs, &RunTrajectory::full_neutral_step);
    return result;
}

// Stance-labeled snapshots of the recorded run at the requested steps; steps
// past termination return the final absorbed state. Converted nodes carry no
// subcategory (they are no longer classified into the neutral sub-areas).
inline std::vector<Snapshot> snapshot_states(const Snapshot& base,
                                             const SofteningResult& result,
                                             std::span<const std::uint32_t> steps) {
    if (result.run0_states.empty())
        throw Error(ErrorKind::StepNotRecorded,
                    "run_ensemble was executed without record_states");
    std::vector<Snapshot> out;
    out.reserve(steps.size());
    const auto edges = base.follow_edges();
    for (std::uint32_t step : steps) {
        const std::size_t idx = std::min<std::size_t>(step, result.run0_states.size() - 1);
        const auto& stances = result.run0_states[idx];
        std::vector<PageNode> nodes = base.nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].stance != stances[i]) {
                nodes[i].stance = stances[i];
                nodes[i].subcategory.reset();
            }
        }
        out.push_back(build_snapshot(base.label() + "+step" + std::to_string(step),
                                     std::move(nodes), edges));
    }
    return out;
}

}  // namespace triarch
