#pragma once
// Seeded generator of reference-calibrated tri-polar networks: a directed
// stance-block stochastic block model plus node metadata (neutral
// subcategories, gazetteer toponyms in titles, fan counts, coordinates).
// Defaults reproduce the reference ecosystem shape: 501/211/644 nodes per
// stance, exact per-stance fan totals, dense anti-neutral entanglement with
// a peripheral pro cluster, and a toponym assignment that puts exactly 342
// pages at local scale under the shipped gazetteer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "triarch/error.hpp"
#include "triarch/glocality.hpp"
#include "triarch/graph.hpp"
#include "triarch/rng.hpp"

namespace triarch {

struct GeneratorConfig {
    // Node counts per stance, indexed by Stance (anti, pro, neutral).
    std::array<std::uint32_t, 3> stance_nodes{501, 211, 644};

    // Directed edge probability between stance blocks, [source][target].
    // Calibration constants, not reported values: anti-anti dense, heavy
    // anti-neutral coupling, a cohesive but weakly-attached pro block.
    std::array<std::array<double, 3>, 3> block_prob{{
        {0.0100, 0.0005, 0.0060},   // anti ->
        {0.0005, 0.0300, 0.0040},   // pro ->
        {0.0060, 0.0040, 0.0050},   // neutral ->
    }};

    std::array<double, kSubcategoryCount> subcategory_weights{
        0.18, 0.16, 0.08, 0.12, 0.08, 0.07, 0.06, 0.05, 0.06, 0.03, 0.06, 0.05};

    // Toponym assignment over [none, neighborhood, city, metro_county,
    // state_province, country, multi_country_region, continent, global].
    // With the default 1,356 nodes these weights apportion to counts
    // 244/40/150/70/82/350/120/100/200, i.e. 342 local pages.
    std::array<double, 9> toponym_weights{244.0 / 1356, 40.0 / 1356,  150.0 / 1356,
                                          70.0 / 1356,  82.0 / 1356,  350.0 / 1356,
                                          120.0 / 1356, 100.0 / 1356, 200.0 / 1356};

    // Exact per-stance fan-count totals (anti, pro, neutral).
    std::array<std::uint64_t, 3> fan_totals{7'500'000, 13'000'000, 66'200'000};

    double coordinate_fraction = 0.55;  // pages carrying lat/lon
    std::uint64_t seed = 1356;
    std::string label;  // empty = "synth-<seed>"
};

// Largest-remainder apportionment of `total` into counts proportional to
// weights; ties break toward lower index. Deterministic.
inline std::vector<std::uint64_t> apportion(std::span<const double> weights,
                                            std::uint64_t total) {
    std::vector<std::uint64_t> counts(weights.size(), 0);
    double weight_sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw Error(ErrorKind::BadArgs, "negative apportionment weight");
        weight_sum += w;
    }
    if (weights.empty() || total == 0 || weight_sum <= 0.0) return counts;

    std::vector<std::pair<double, std::size_t>> remainders;
    remainders.reserve(weights.size());
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double share = static_cast<double>(total) * (weights[i] / weight_sum);
        counts[i] = static_cast<std::uint64_t>(share);
        assigned += counts[i];
        remainders.emplace_back(share - static_cast<double>(counts[i]), i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned)
        ++counts[remainders[i % remainders.size()].second];
    return counts;
}

// Toponym strings used for generated titles, one list per scale family.
// The shipped gazetteer fixture carries the same entries.
inline const Gazetteer& default_toponym_pool() {
    static const Gazetteer gaz = [] {
        Gazetteer g;
        auto add = [&](ScaleFamily f, std::initializer_list<const char*> names) {
            for (const char* n : names) g.add(n, f);
        };
        add(ScaleFamily::Neighborhood,
            {"Park Slope", "Brooklyn", "Shoreditch", "Fitzroy", "Wicker Park", "Montmartre"});
        add(ScaleFamily::City, {"Nashville TN", "Brisbane", "Austin TX", "Portland OR",
                                "Manchester", "Lyon", "Torino", "Rotterdam"});
        add(ScaleFamily::MetroCounty,
            {"Greater Sydney", "Cook County", "King County", "Essex County", "Bay Area"});
        add(ScaleFamily::StateProvince,
            {"Texas", "California", "Queensland", "Ontario", "Bavaria", "Provence"});
        add(ScaleFamily::Country, {"Canada", "Australia", "France", "Italy", "Netherlands",
                                   "Russia", "United States", "United Kingdom"});
        add(ScaleFamily::MultiCountryRegion,
            {"Scandinavia", "Balkans", "Latin America", "Middle East", "Southeast Asia"});
        add(ScaleFamily::Continent,
            {"Europe", "Africa", "North America", "South America", "Asia", "Oceania"});
        add(ScaleFamily::Global, {"Global", "Worldwide", "International"});
        return g;
    }();
    return gaz;
}

namespace detail {

// Title phrases; none of these contain a gazetteer toponym.
inline const char* title_phrase(Stance stance, std::uint64_t pick) {
    static const char* anti[] = {"Vaccine Truth",   "Health Freedom Voices",
                                 "Medical Choice",  "Informed Parents United",
                                 "Natural Immunity Forum", "Freedom Health Watch"};
    static const char* pro[] = {"Immunization Alliance", "Science Advocates",
                                "Public Health Forum",   "Vaccine Facts Initiative",
                                "Evidence Based Health"};
    static const char* neutral[] = {"Parenting Circle",   "Wellness Collective",
                                    "Family Health Hub",  "Community Gardeners",
                                    "Mindful Living",     "Holistic Kitchen",
                                    "Homeschool Network", "Neighbors Helping Neighbors"};
    switch (stance) {
        case Stance::Anti:    return anti[pick % (sizeof(anti) / sizeof(anti[0]))];
        case Stance::Pro:     return pro[pick % (sizeof(pro) / sizeof(pro[0]))];
        case Stance::Neutral: return neutral[pick % (sizeof(neutral) / sizeof(neutral[0]))];
    }
    return "Community Page";
}

}  // namespace detail

// Deterministic per seed: same config, same Snapshot, bit for bit.
inline Snapshot generate(const GeneratorConfig& config) {
    for (const auto& row : config.block_prob)
        for (double p : row)
            if (p < 0.0 || p > 1.0)
                throw Error(ErrorKind::BadArgs, "block probability outside [0,1]");

    const std::uint64_t n =
        static_cast<std::uint64_t>(config.stance_nodes[0]) + config.stance_nodes[1] +
        config.stance_nodes[2];
    std::vector<PageNode> nodes(n);

    // Stable ids; stance blocks are contiguous in id order.
    int width = 1;
    for (std::uint64_t v = n > 0 ? n - 1 : 0; v >= 10 && width < 20; v /= 10) ++width;
    auto stance_of = [&](std::uint64_t i) {
        if (i < config.stance_nodes[0]) return Stance::Anti;
        if (i < static_cast<std::uint64_t>(config.stance_nodes[0]) + config.stance_nodes[1])
            return Stance::Pro;
        return Stance::Neutral;
    };
    for (std::uint64_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "p%0*llu", width, static_cast<unsigned long long>(i));
        nodes[i].id = buf;
        nodes[i].stance = stance_of(i);
    }

    // Neutral subcategories.
    {
        Rng rng(derive_seed(config.seed, 11));
        const auto counts =
            apportion(config.subcategory_weights, config.stance_nodes[2]);
        std::vector<NeutralSubcategory> bag;
        for (std::size_t c = 0; c < counts.size(); ++c)
            bag.insert(bag.end(), counts[c], static_cast<NeutralSubcategory>(c));
        rng.shuffle(bag);
        std::size_t next = 0;
        for (auto& node : nodes)
            if (node.stance == Stance::Neutral) node.subcategory = bag[next++];
    }

    // Toponym scale assignment and titles.
    {
        Rng rng(derive_seed(config.seed, 12));
        const auto counts = apportion(config.toponym_weights, n);
        // category 0 = none, 1..8 = ScaleFamily
        std::vector<std::uint8_t> bag;
        for (std::size_t c = 0; c < counts.size(); ++c)
            bag.insert(bag.end(), counts[c], static_cast<std::uint8_t>(c));
        rng.shuffle(bag);

        std::array<std::vector<const std::string*>, kScaleFamilyCount> pool;
        for (const GazetteerEntry& e : default_toponym_pool().entries)
            pool[static_cast<std::size_t>(e.scale)].push_back(&e.toponym);

        for (std::uint64_t i = 0; i < n; ++i) {
            const char* phrase = detail::title_phrase(nodes[i].stance, rng.next_u64());
            if (bag[i] == 0) {
                nodes[i].title = phrase;
            } else {
                const auto& fam = pool[bag[i] - 1];
                if (fam.empty())
                    throw Error(ErrorKind::BadArgs,
                                std::string("no toponyms available for scale family ") +
                                    to_string(static_cast<ScaleFamily>(bag[i] - 1)));
                const std::string& topo = *fam[rng.next_below(fam.size())];
                nodes[i].title = topo + " " + phrase;
            }
        }
    }

    // Fan counts: lognormal weights apportioned to exact per-stance totals.
    {
        Rng rng(derive_seed(config.seed, 13));
        for (Stance stance : kAllStances) {
            std::vector<std::size_t> members;
            for (std::uint64_t i = 0; i < n; ++i)
                if (nodes[i].stance == stance) members.push_back(i);
            std::vector<double> weights(members.size());
            for (double& w : weights) w = std::exp(1.2 * rng.normal());
            const auto fans =
                apportion(weights, config.fan_totals[static_cast<std::size_t>(stance)]);
            for (std::size_t k = 0; k < members.size(); ++k)
                nodes[members[k]].fan_count = fans[k];
        }
    }

    // Declared coordinates for a seeded fraction of pages.
    {
        Rng rng(derive_seed(config.seed, 14));
        for (auto& node : nodes) {
            if (rng.bernoulli(config.coordinate_fraction)) {
                node.lat = rng.uniform(-55.0, 70.0);
                node.lon = rng.uniform(-180.0, 180.0);
            }
        }
    }

    // Directed SBM edges.
    std::vector<FollowEdge> edges;
    {
        Rng rng(derive_seed(config.seed, 15));
        for (std::uint64_t u = 0; u < n; ++u) {
            const auto& row = config.block_prob[static_cast<std::size_t>(nodes[u].stance)];
            for (std::uint64_t v = 0; v < n; ++v) {
                if (u == v) continue;
                if (rng.bernoulli(row[static_cast<std::size_t>(nodes[v].stance)]))
                    edges.push_back({nodes[u].id, nodes[v].id});
            }
        }
    }

    const std::string label =
        config.label.empty() ? "synth-" + std::to_string(config.seed) : config.label;
    return build_snapshot(label, std::move(nodes), edges);
}

// Removes floor(fraction * stance_count) uniformly chosen nodes per stance
// (a 1e-9 slack absorbs the representation error of rational fractions such
// as 168/501), plus all incident edges. Deterministic per seed.
inline Snapshot apply_removal(const Snapshot& s, const std::array<double, 3>& fractions,
                              std::uint64_t seed) {
    for (double f : fractions)
        if (f < 0.0 || f > 1.0)
            throw Error(ErrorKind::BadArgs, "removal fraction outside [0,1]");

    const auto tallies = stance_counts(s);
    std::vector<bool> removed(s.node_count(), false);
    Rng rng(derive_seed(seed, 21));
    for (Stance stance : kAllStances) {
        const auto si = static_cast<std::size_t>(stance);
        std::vector<NodeIndex> members;
        for (NodeIndex i = 0; i < s.node_count(); ++i)
            if (s.node(i).stance == stance) members.push_back(i);
        const auto k = static_cast<std::size_t>(
            fractions[si] * static_cast<double>(tallies[si].node_count) + 1e-9);
        rng.partial_shuffle(members, k);
        for (std::size_t j = 0; j < k; ++j) removed[members[j]] = true;
    }

    std::vector<PageNode> survivors;
    survivors.reserve(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i)
        if (!removed[i]) survivors.push_back(s.node(i));
    std::vector<FollowEdge> edges;
    for (auto [u, v] : s.edges())
        if (!removed[u] && !removed[v]) edges.push_back({s.node(u).id, s.node(v).id});
    return build_snapshot(s.label() + "+removal", std::move(survivors), edges);
}

}  // namespace triarch
