#pragma once
// Topic glocality (keyword-lexicon topic mixes, entropy, cross-topic edges)
// and geographic glocality (toponym extraction against a gazetteer, eight
// spatial-scale families, cross-scale network, local/global partition,
// chi-square independence).

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triarch/error.hpp"
#include "triarch/graph.hpp"
#include "triarch/records.hpp"
#include "triarch/stats.hpp"

namespace triarch {

// ---------------------------------------------------------------------------
// Topic side
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 5> kRequiredTopics = {
    "abortion", "climate", "covid19", "elections", "mpox"};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Topic names are kept sorted; patterns are stored lowercased.
struct TopicLexicon {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> patterns;

    std::size_t topic_count() const { return names.size(); }

    std::optional<std::uint32_t> topic_index(std::string_view name) const {
        auto it = std::lower_bound(names.begin(), names.end(), name);
        if (it == names.end() || *it != name) return std::nullopt;
        return static_cast<std::uint32_t>(it - names.begin());
    }

    void add_topic(std::string name, std::vector<std::string> topic_patterns) {
        for (auto& p : topic_patterns) p = to_lower(p);
        auto it = std::lower_bound(names.begin(), names.end(), name);
        if (it != names.end() && *it == name)
            throw Error(ErrorKind::BadRow, "duplicate topic '" + name + "'");
        auto pos = it - names.begin();
        names.insert(it, std::move(name));
        patterns.insert(patterns.begin() + pos, std::move(topic_patterns));
    }

    // The five discourse topics must be present and every topic needs a pattern.
    void validate() const {
        for (std::string_view required : kRequiredTopics)
            if (!topic_index(required))
                throw Error(ErrorKind::MissingTopic,
                            "lexicon lacks required topic '" + std::string(required) + "'");
        for (std::size_t i = 0; i < names.size(); ++i)
            if (patterns[i].empty())
                throw Error(ErrorKind::BadRow, "topic '" + names[i] + "' has no patterns");
    }
};

namespace detail {
inline bool contains_ci(std::string_view haystack_lower, std::string_view needle_lower) {
    return haystack_lower.find(needle_lower) != std::string_view::npos;
}
}  // namespace detail

// Per-post set of matched topic indices (indices into lexicon.names).
// A post matches a topic iff any pattern occurs case-insensitively.
inline std::vector<std::vector<std::uint32_t>> classify_posts(
    std::span<const PostRecord> posts, const TopicLexicon& lexicon) {
    std::vector<std::vector<std::uint32_t>> out(posts.size());
    for (std::size_t p = 0; p < posts.size(); ++p) {
        const std::string text = to_lower(posts[p].text);
        for (std::uint32_t t = 0; t < lexicon.topic_count(); ++t) {
            for (const std::string& pat : lexicon.patterns[t]) {
                if (detail::contains_ci(text, pat)) {
                    out[p].push_back(t);
                    break;
                }
            }
        }
    }
    return out;
}

struct TopicMix {
    std::vector<double> proportion;  // aligned to lexicon.names; sums to 1 when non-empty
    bool empty = true;               // no post matched any topic
    std::uint32_t dominant = 0;      // argmax; ties break to the smaller (lexicographic) name
    std::uint64_t matched_posts = 0;
};

// proportion(topic) = topic's matched-post count / total matched incidences
// (a post matching two topics contributes one incidence to each).
inline TopicMix topic_mix(std::span<const PostRecord> page_posts, const TopicLexicon& lexicon) {
    TopicMix mix;
    mix.proportion.assign(lexicon.topic_count(), 0.0);
    const auto matches = classify_posts(page_posts, lexicon);
    std::uint64_t incidences = 0;
    for (const auto& topics : matches) {
        if (!topics.empty()) ++mix.matched_posts;
        for (std::uint32_t t : topics) {
            mix.proportion[t] += 1.0;
            ++incidences;
        }
    }
    if (incidences == 0) return mix;
    mix.empty = false;
    for (double& p : mix.proportion) p /= static_cast<double>(incidences);
    mix.dominant = 0;
    for (std::uint32_t t = 1; t < mix.proportion.size(); ++t)
        if (mix.proportion[t] > mix.proportion[mix.dominant]) mix.dominant = t;
    return mix;
}

// Shannon entropy, base 2.
inline double topic_entropy(const TopicMix& mix) {
    if (mix.empty) throw Error(ErrorKind::EmptyMix, "entropy of empty topic mix");
    double h = 0.0;
    for (double p : mix.proportion)
        if (p > 0.0) h -= p * std::log2(p);
    return h < 0.0 ? 0.0 : h;
}

struct CrossTopicResult {
    double fraction = 0.0;         // among edges with both endpoints classified
    std::uint64_t counted_edges = 0;
    std::uint64_t excluded_edges = 0;  // an endpoint had an empty mix
};

inline CrossTopicResult cross_topic_edge_fraction(const Snapshot& s,
                                                  std::span<const TopicMix> mixes) {
    CrossTopicResult r;
    std::uint64_t cross = 0;
    for (auto [u, v] : s.edges()) {
        if (mixes[u].empty || mixes[v].empty) {
            ++r.excluded_edges;
            continue;
        }
        ++r.counted_edges;
        if (mixes[u].dominant != mixes[v].dominant) ++cross;
    }
    if (r.counted_edges > 0)
        r.fraction = static_cast<double>(cross) / static_cast<double>(r.counted_edges);
    return r;
}

// ---------------------------------------------------------------------------
// Geographic side
// ---------------------------------------------------------------------------

// Ordered fine-to-coarse; comparisons rely on this ordering.
enum class ScaleFamily : std::uint8_t {
    Neighborhood = 0,
    City,
    MetroCounty,
    StateProvince,
    Country,
    MultiCountryRegion,
    Continent,
    Global,
};

inline constexpr std::size_t kScaleFamilyCount = 8;

inline const char* to_string(ScaleFamily f) {
    static const char* names[kScaleFamilyCount] = {
        "neighborhood", "city",     "metro_county",         "state_province",
        "country",      "multi_country_region", "continent", "global"};
    return names[static_cast<std::size_t>(f)];
}

inline std::optional<ScaleFamily> parse_scale_family(std::string_view text) {
    const std::string lower = to_lower(text);
    for (std::size_t i = 0; i < kScaleFamilyCount; ++i)
        if (lower == to_string(static_cast<ScaleFamily>(i)))
            return static_cast<ScaleFamily>(i);
    return std::nullopt;
}

// Local reach = anything up to state/province scale.
inline bool is_local_scale(ScaleFamily f) { return f <= ScaleFamily::StateProvince; }

struct GazetteerEntry {
    std::string toponym;
    ScaleFamily scale;
};

struct Gazetteer {
    std::vector<GazetteerEntry> entries;

    void add(std::string toponym, ScaleFamily scale) {
        entries.push_back({std::move(toponym), scale});
    }
};

struct ToponymRecord {
    std::string toponym;  // as listed in the gazetteer
    ScaleFamily scale;

    friend bool operator==(const ToponymRecord&, const ToponymRecord&) = default;
};

namespace detail {

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
}

struct ToponymMatch {
    std::size_t start;
    std::size_t length;
    std::uint32_t entry;
};

// All boundary-respecting case-insensitive occurrences of gazetteer entries.
inline void find_matches(std::string_view text_lower, const Gazetteer& gaz,
                         std::vector<ToponymMatch>& out) {
    for (std::uint32_t e = 0; e < gaz.entries.size(); ++e) {
        const std::string needle = to_lower(gaz.entries[e].toponym);
        if (needle.empty()) continue;
        std::size_t pos = 0;
        while ((pos = text_lower.find(needle, pos)) != std::string_view::npos) {
            const bool left_ok = pos == 0 || !is_word_char(text_lower[pos - 1]);
            const std::size_t end = pos + needle.size();
            const bool right_ok = end == text_lower.size() || !is_word_char(text_lower[end]);
            if (left_ok && right_ok) out.push_back({pos, needle.size(), e});
            ++pos;
        }
    }
}

// Overlap resolution: longest first, then leftmost, then gazetteer order.
inline std::vector<ToponymRecord> resolve_matches(std::vector<ToponymMatch> matches,
                                                  const Gazetteer& gaz) {
    std::sort(matches.begin(), matches.end(),
              [](const ToponymMatch& a, const ToponymMatch& b) {
                  if (a.length != b.length) return a.length > b.length;
                  if (a.start != b.start) return a.start < b.start;
                  return a.entry < b.entry;
              });
    std::vector<std::pair<std::size_t, std::size_t>> taken;
    std::vector<const ToponymMatch*> accepted;
    for (const ToponymMatch& m : matches) {
        bool overlaps = false;
        for (auto [s, e] : taken) {
            if (m.start < e && s < m.start + m.length) {
                overlaps = true;
                break;
            }
        }
        if (overlaps) continue;
        taken.emplace_back(m.start, m.start + m.length);
        accepted.push_back(&m);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const ToponymMatch* a, const ToponymMatch* b) { return a->start < b->start; });
    std::vector<ToponymRecord> records;
    records.reserve(accepted.size());
    for (const ToponymMatch* m : accepted)
        records.push_back({gaz.entries[m->entry].toponym, gaz.entries[m->entry].scale});
    return records;
}

}  // namespace detail

// Scans the title, then the location text. Deterministic and order-stable.
inline std::vector<ToponymRecord> extract_toponyms(const PageNode& node,
                                                   const Gazetteer& gazetteer) {
    std::vector<ToponymRecord> records;
    for (const std::string* text : {&node.title, &node.location_text}) {
        if (text->empty()) continue;
        std::vector<detail::ToponymMatch> matches;
        const std::string lower = to_lower(*text);
        detail::find_matches(lower, gazetteer, matches);
        auto part = detail::resolve_matches(std::move(matches), gazetteer);
        records.insert(records.end(), part.begin(), part.end());
    }
    return records;
}

// Coarsest (widest) scale among a page's toponyms.
inline std::optional<ScaleFamily> coarsest_scale(std::span<const ToponymRecord> toponyms) {
    std::optional<ScaleFamily> out;
    for (const ToponymRecord& t : toponyms)
        if (!out || t.scale > *out) out = t.scale;
    return out;
}

struct ScaleEdge {
    NodeIndex source;
    NodeIndex target;
    ScaleFamily source_scale;  // coarsest family of each endpoint
    ScaleFamily target_scale;
};

struct ScaleNetwork {
    std::vector<NodeIndex> pages;  // pages with at least one toponym
    std::vector<ScaleEdge> edges;
    std::uint64_t excluded_no_toponym = 0;  // edges dropped for a toponym-less endpoint
    std::uint64_t excluded_same_family = 0;
};

// Keeps exactly the follow-edges whose endpoints' coarsest scale families
// differ (both endpoints must carry a toponym), so every emitted edge
// bridges two distinct families.
inline ScaleNetwork build_scale_network(const Snapshot& s,
                                        std::span<const std::vector<ToponymRecord>> toponyms) {
    ScaleNetwork net;
    std::vector<std::optional<ScaleFamily>> coarsest(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i) {
        coarsest[i] = coarsest_scale(toponyms[i]);
        if (coarsest[i]) net.pages.push_back(i);
    }
    for (auto [u, v] : s.edges()) {
        if (!coarsest[u] || !coarsest[v]) {
            ++net.excluded_no_toponym;
            continue;
        }
        if (*coarsest[u] == *coarsest[v]) {
            ++net.excluded_same_family;
            continue;
        }
        net.edges.push_back({u, v, *coarsest[u], *coarsest[v]});
    }
    return net;
}

struct LocalGlobalPartition {
    std::vector<NodeIndex> local_pages;
    std::vector<NodeIndex> global_pages;  // includes no-toponym pages
    std::uint64_t local_fan_total = 0;
    std::uint64_t global_fan_total = 0;
    std::uint32_t no_toponym_pages = 0;  // reported separately, counted as global
};

// Local iff the page's coarsest family is neighborhood/city/metro/state.
inline LocalGlobalPartition local_global_partition(
    std::span<const std::vector<ToponymRecord>> toponyms, const Snapshot& s) {
    LocalGlobalPartition part;
    for (NodeIndex i = 0; i < s.node_count(); ++i) {
        const auto scale = coarsest_scale(toponyms[i]);
        const std::uint64_t fans = s.node(i).fan_count;
        if (scale && is_local_scale(*scale)) {
            part.local_pages.push_back(i);
            part.local_fan_total += fans;
        } else {
            if (!scale) ++part.no_toponym_pages;
            part.global_pages.push_back(i);
            part.global_fan_total += fans;
        }
    }
    return part;
}

// ---------------------------------------------------------------------------
// Chi-square independence
// ---------------------------------------------------------------------------

struct ChiSquareResult {
    double statistic = 0.0;
    std::uint32_t dof = 0;
    double p_value = 1.0;
};

// Pearson chi-square on an r x c table of non-negative counts.
inline ChiSquareResult chi_square_independence(const std::vector<std::vector<double>>& table) {
    const std::size_t rows = table.size();
    const std::size_t cols = rows > 0 ? table[0].size() : 0;
    if (rows < 2 || cols < 2)
        throw Error(ErrorKind::DegenerateMarginal, "table needs at least 2 rows and 2 columns");
    for (const auto& row : table)
        if (row.size() != cols)
            throw Error(ErrorKind::BadRow, "ragged contingency table");

    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (table[r][c] < 0.0)
                throw Error(ErrorKind::BadRow, "negative count in contingency table");
            row_sum[r] += table[r][c];
            col_sum[c] += table[r][c];
            total += table[r][c];
        }
    for (double v : row_sum)
        if (v <= 0.0) throw Error(ErrorKind::DegenerateMarginal, "zero row marginal");
    for (double v : col_sum)
        if (v <= 0.0) throw Error(ErrorKind::DegenerateMarginal, "zero column marginal");

    ChiSquareResult res;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double expected = row_sum[r] * col_sum[c] / total;
            const double diff = table[r][c] - expected;
            res.statistic += diff * diff / expected;
        }
    res.dof = static_cast<std::uint32_t>((rows - 1) * (cols - 1));
    res.p_value = chi_square_upper_tail(res.statistic, res.dof);
    return res;
}

}  // namespace triarch
