#pragma once
// Force-directed layout: linear springs along edges, degree-weighted 1/d
// pairwise repulsion (exact or Barnes-Hut), degree-weighted gravity, and the
// swing-based adaptive speed heuristic from the ForceAtlas2 reference
// implementation. Directed edges act as undirected springs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "triarch/error.hpp"
#include "triarch/graph.hpp"
#include "triarch/quadtree.hpp"
#include "triarch/rng.hpp"
#include "triarch/threads.hpp"

namespace triarch {

struct LayoutParams {
    double repulsion_k = 2.0;       // k_r > 0
    double gravity_k = 1.0;         // k_g >= 0
    double theta = 1.2;             // Barnes-Hut opening angle; 0 = exact
    double jitter_tolerance = 1.0;  // tau in the speed heuristic
    double displacement_tolerance = 1e-3;  // mean displacement stop threshold
    std::uint32_t max_iterations = 1000;
    bool use_barnes_hut = true;     // false forces exact pairwise repulsion
    unsigned threads = 0;
};

struct LayoutState {
    std::vector<Vec2> position;
    std::vector<Vec2> previous_force;  // for per-node swing
    double global_speed = 1.0;
    double speed_efficiency = 1.0;
    std::uint64_t iteration = 0;
    std::uint64_t seed = 0;
    double mean_displacement = std::numeric_limits<double>::infinity();
};

// Seeded positions in the unit disc; re-draws the rare exact collision so
// no two nodes start at identical coordinates.
inline LayoutState init_layout(const Snapshot& s, std::uint64_t seed) {
    LayoutState state;
    state.seed = seed;
    const std::size_t n = s.node_count();
    state.position.resize(n);
    state.previous_force.assign(n, {});
    Rng rng(derive_seed(seed, 0x1a70u));
    std::unordered_set<std::uint64_t> used;
    for (std::size_t i = 0; i < n; ++i) {
        while (true) {
            const double angle = rng.uniform(0.0, 6.283185307179586);
            const double radius = std::sqrt(rng.next_double());
            Vec2 p{radius * std::cos(angle), radius * std::sin(angle)};
            std::uint64_t key;
            static_assert(sizeof(double) == 8);
            std::memcpy(&key, &p.x, 8);
            std::uint64_t ky;
            std::memcpy(&ky, &p.y, 8);
            key ^= ky * 0x9e3779b97f4a7c15ULL;
            if (used.insert(key).second) {
                state.position[i] = p;
                break;
            }
        }
    }
    return state;
}

namespace detail {

// deg + 1 over the deduplicated undirected neighbor sets.
inline std::vector<double> layout_masses(const Snapshot& s) {
    std::vector<double> m(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i)
        m[i] = static_cast<double>(s.undirected_degree(i)) + 1.0;
    return m;
}

}  // namespace detail

// One synchronous iteration: evaluate all forces against the current
// positions, then move every node once.
inline void layout_step(LayoutState& state, const Snapshot& s, const LayoutParams& params) {
    const std::size_t n = s.node_count();
    if (n == 0) {
        ++state.iteration;
        state.mean_displacement = 0.0;
        return;
    }
    const std::vector<double> masses = detail::layout_masses(s);
    const unsigned workers = resolve_threads(params.threads);

    const double theta = params.use_barnes_hut ? params.theta : 0.0;
    std::vector<Vec2> force =
        barnes_hut_repulsion(state.position, masses, theta, params.repulsion_k, workers);

    // Springs (linear in distance) and gravity, per node over its incident
    // edges; every edge is handled once from each endpoint.
    parallel_blocks(n, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Vec2 f = force[i];
            const Vec2 p = state.position[i];
            for (NodeIndex j : s.undirected_neighbors(static_cast<NodeIndex>(i))) {
                f.x += state.position[j].x - p.x;
                f.y += state.position[j].y - p.y;
            }
            if (params.gravity_k > 0.0) {
                const double d = std::sqrt(p.norm2());
                if (d > 1e-12) {
                    const double g = params.gravity_k * masses[i] / d;
                    f.x -= g * p.x;
                    f.y -= g * p.y;
                }
            }
            force[i] = f;
        }
    });

    // Swing / traction totals, in node order.
    double total_swing = 0.0;
    double total_traction = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 delta = force[i] - state.previous_force[i];
        const Vec2 sum = force[i] + state.previous_force[i];
        total_swing += masses[i] * std::sqrt(delta.norm2());
        total_traction += 0.5 * masses[i] * std::sqrt(sum.norm2());
    }

    // Global speed update (ForceAtlas2 heuristic).
    const double estimated_jt = 0.05 * std::sqrt(static_cast<double>(n));
    const double min_jt = std::sqrt(estimated_jt);
    const double max_jt = 10.0;
    double jt = params.jitter_tolerance *
                std::max(min_jt, std::min(max_jt, estimated_jt * total_traction /
                                                      (static_cast<double>(n) *
                                                       static_cast<double>(n))));
    const double min_efficiency = 0.05;
    if (total_swing > 2.0 * total_traction) {
        if (state.speed_efficiency > min_efficiency) state.speed_efficiency *= 0.5;
        jt = std::max(jt, params.jitter_tolerance);
    }
    double target_speed = total_swing > 0.0
                              ? jt * state.speed_efficiency * total_traction / total_swing
                              : state.global_speed * 1.5;
    if (total_swing > jt * total_traction) {
        if (state.speed_efficiency > min_efficiency) state.speed_efficiency *= 0.7;
    } else if (state.global_speed < 1000.0) {
        state.speed_efficiency *= 1.3;
    }
    state.global_speed += std::min(target_speed - state.global_speed, 0.5 * state.global_speed);

    // Per-node damped displacement; synchronous position update.
    double displacement_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 delta = force[i] - state.previous_force[i];
        const double swing = masses[i] * std::sqrt(delta.norm2());
        const double factor =
            state.global_speed / (1.0 + std::sqrt(state.global_speed * swing));
        const Vec2 move{force[i].x * factor, force[i].y * factor};
        state.position[i] += move;
        displacement_sum += std::sqrt(move.norm2());
        if (!std::isfinite(state.position[i].x) || !std::isfinite(state.position[i].y))
            throw Error(ErrorKind::NumericalBlowup,
                        "non-finite position for node '" + s.node(static_cast<NodeIndex>(i)).id +
                            "' at iteration " + std::to_string(state.iteration + 1));
    }
    state.previous_force = std::move(force);
    state.mean_displacement = displacement_sum / static_cast<double>(n);
    ++state.iteration;
}

// Iterates until max_iterations or the mean displacement drops below the
// tolerance. Deterministic for a given (snapshot, params, seed).
inline std::vector<Vec2> run_layout(const Snapshot& s, const LayoutParams& params,
                                    std::uint64_t seed) {
    LayoutState state = init_layout(s, seed);
    for (std::uint32_t it = 0; it < params.max_iterations; ++it) {
        layout_step(state, s, params);
        if (state.mean_displacement < params.displacement_tolerance) break;
    }
    return state.position;
}

}  // namespace triarch
