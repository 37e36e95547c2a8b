#pragma once
// Persistence-despite-removal analytics: per-stance node/edge attrition
// between two snapshots, stance mixing matrices with an L1 persistence
// distance, and posting-activity recency histograms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triarch/error.hpp"
#include "triarch/graph.hpp"
#include "triarch/records.hpp"
#include "triarch/timeutil.hpp"

namespace triarch {

// How an edge's loss is attributed to stances. Incident counts the edge
// under both endpoints' stances (so the three per-stance totals are not a
// disjoint partition); SourceOnly attributes by the source page alone.
enum class EdgeAttribution { Incident, SourceOnly };

struct StanceAttrition {
    std::uint32_t node_total = 0;
    std::uint32_t node_removed = 0;
    double node_pct = 0.0;
    std::uint64_t edge_total = 0;
    std::uint64_t edge_removed = 0;
    double edge_pct = 0.0;
};

struct AttritionReport {
    std::array<StanceAttrition, 3> per_stance{};  // indexed by Stance
    std::uint32_t node_total = 0;
    std::uint32_t node_removed = 0;
    double overall_node_pct = 0.0;
    std::uint64_t edge_total = 0;
    std::uint64_t edge_removed = 0;
    double overall_edge_pct = 0.0;
    EdgeAttribution attribution = EdgeAttribution::Incident;
};

// A node is removed iff present in before and absent (by id) in after; an
// edge is removed iff its ordered id pair is in before and not in after.
inline AttritionReport diff_attrition(const Snapshot& before, const Snapshot& after,
                                      EdgeAttribution attribution = EdgeAttribution::Incident) {
    if (before.label() == after.label())
        throw Error(ErrorKind::LabelClash, "both snapshots labeled '" + before.label() + "'");

    AttritionReport rep;
    rep.attribution = attribution;
    for (const PageNode& n : before.nodes()) {
        auto& s = rep.per_stance[static_cast<std::size_t>(n.stance)];
        ++s.node_total;
        ++rep.node_total;
        if (!after.index_of(n.id)) {
            ++s.node_removed;
            ++rep.node_removed;
        }
    }

    // After-side edges by id pair, for removal lookup.
    std::set<std::pair<std::string_view, std::string_view>> after_edges;
    for (auto [u, v] : after.edges())
        after_edges.emplace(after.node(u).id, after.node(v).id);

    for (auto [u, v] : before.edges()) {
        const Stance su = before.node(u).stance;
        const Stance sv = before.node(v).stance;
        const bool removed =
            !after_edges.count({before.node(u).id, before.node(v).id});
        ++rep.edge_total;
        if (removed) ++rep.edge_removed;

        auto attribute = [&](Stance s) {
            auto& a = rep.per_stance[static_cast<std::size_t>(s)];
            ++a.edge_total;
            if (removed) ++a.edge_removed;
        };
        if (attribution == EdgeAttribution::SourceOnly) {
            attribute(su);
        } else {
            attribute(su);
            if (sv != su) attribute(sv);
        }
    }

    auto pct = [](std::uint64_t removed, std::uint64_t total) {
        return total == 0 ? 0.0 : 100.0 * static_cast<double>(removed) / static_cast<double>(total);
    };
    for (auto& s : rep.per_stance) {
        s.node_pct = pct(s.node_removed, s.node_total);
        s.edge_pct = pct(s.edge_removed, s.edge_total);
    }
    rep.overall_node_pct = pct(rep.node_removed, rep.node_total);
    rep.overall_edge_pct = pct(rep.edge_removed, rep.edge_total);
    return rep;
}

// Stance-by-stance distribution of edge endpoints; entry (A,B) is the
// fraction of edges with source stance A and target stance B.
struct MixingMatrix {
    std::array<std::array<double, 3>, 3> fraction{};
    bool defined = false;  // false on an empty graph
    std::uint64_t edge_count = 0;
};

inline MixingMatrix mixing_matrix(const Snapshot& s) {
    MixingMatrix m;
    m.edge_count = s.edge_count();
    if (m.edge_count == 0) return m;
    m.defined = true;
    for (auto [u, v] : s.edges()) {
        const auto a = static_cast<std::size_t>(s.node(u).stance);
        const auto b = static_cast<std::size_t>(s.node(v).stance);
        m.fraction[a][b] += 1.0;
    }
    const double denom = static_cast<double>(m.edge_count);
    for (auto& row : m.fraction)
        for (double& f : row) f /= denom;
    return m;
}

// L1 distance between mixing matrices; in [0, 2].
inline double matrix_distance(const MixingMatrix& a, const MixingMatrix& b) {
    if (!a.defined || !b.defined)
        throw Error(ErrorKind::UndefinedMatrix, "mixing matrix of an empty graph");
    double d = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            d += std::abs(a.fraction[i][j] - b.fraction[i][j]);
    return d;
}

// Per-stance, per-calendar-month counts of first-page posts.
struct ActivityHistogram {
    YearMonth window_begin;
    YearMonth window_end;  // inclusive
    // counts[stance][month offset from window_begin]
    std::array<std::vector<std::uint64_t>, 3> counts;
    std::uint32_t first_page_depth = 10;
    std::uint64_t outside_window = 0;   // selected posts falling outside the window
    std::uint64_t unknown_page = 0;     // posts whose page is not in the snapshot

    std::size_t month_count() const {
        return static_cast<std::size_t>(month_diff(window_begin, window_end)) + 1;
    }
};

// For each page, the k most recent posts (what a first-page capture would
// show) are bucketed by calendar month within the window and grouped by
// the page's stance.
inline ActivityHistogram activity_histogram(std::span<const PostRecord> posts,
                                            const Snapshot& s, YearMonth window_begin,
                                            YearMonth window_end, std::uint32_t k = 10) {
    if (k < 1) throw Error(ErrorKind::BadArgs, "first-page depth must be >= 1");
    if (window_end < window_begin)
        throw Error(ErrorKind::BadArgs, "activity window ends before it begins");

    ActivityHistogram h;
    h.window_begin = window_begin;
    h.window_end = window_end;
    h.first_page_depth = k;
    const std::size_t months = h.month_count();
    for (auto& row : h.counts) row.assign(months, 0);

    // Group post indices per page, preserving file order for stable ties.
    std::map<std::string_view, std::vector<std::size_t>> by_page;
    for (std::size_t i = 0; i < posts.size(); ++i)
        by_page[posts[i].page_id].push_back(i);

    for (auto& [page_id, idx] : by_page) {
        const auto node = s.index_of(page_id);
        if (!node) {
            h.unknown_page += idx.size();
            continue;
        }
        // k most recent; stable sort keeps file order among equal timestamps.
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return posts[a].timestamp_utc < posts[b].timestamp_utc;
        });
        const std::size_t take = std::min<std::size_t>(k, idx.size());
        const auto stance = static_cast<std::size_t>(s.node(*node).stance);
        for (std::size_t j = idx.size() - take; j < idx.size(); ++j) {
            const YearMonth ym = year_month_of(posts[idx[j]].timestamp_utc);
            if (ym < window_begin || window_end < ym) {
                ++h.outside_window;
                continue;
            }
            ++h.counts[stance][static_cast<std::size_t>(month_diff(window_begin, ym))];
        }
    }
    return h;
}

}  // namespace triarch
