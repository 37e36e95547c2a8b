#pragma once
// Directed page-network model: stance-labeled nodes, follow edges, and the
// immutable Snapshot built from them. Snapshots are canonicalized on
// construction (nodes sorted by id, edges deduplicated and sorted) so that
// equality, serialization, and seeded algorithms are reproducible.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "triarch/error.hpp"

namespace triarch {

enum class Stance : std::uint8_t { Anti = 0, Pro = 1, Neutral = 2 };

inline constexpr std::array<Stance, 3> kAllStances = {Stance::Anti, Stance::Pro,
                                                      Stance::Neutral};

inline const char* to_string(Stance s) {
    switch (s) {
        case Stance::Anti:    return "anti";
        case Stance::Pro:     return "pro";
        case Stance::Neutral: return "neutral";
    }
    return "?";
}

inline std::optional<Stance> parse_stance(std::string_view text) {
    std::string lower(text);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "anti") return Stance::Anti;
    if (lower == "pro") return Stance::Pro;
    if (lower == "neutral") return Stance::Neutral;
    return std::nullopt;
}

// The 12 sub-areas used for neutral pages. The first four are the named
// defaults; the rest round out the palette and are fixture constants.
enum class NeutralSubcategory : std::uint8_t {
    Parenting = 0,
    AlternativeHealth,
    Gmo,
    SocialMovements,
    Wellness,
    Nutrition,
    Homeschooling,
    Religion,
    LocalCommunity,
    Pets,
    Environment,
    GeneralHealth,
};

inline constexpr std::size_t kSubcategoryCount = 12;

inline const char* to_string(NeutralSubcategory c) {
    static const char* names[kSubcategoryCount] = {
        "parenting",      "alternative_health", "gmo",       "social_movements",
        "wellness",       "nutrition",          "homeschooling", "religion",
        "local_community", "pets",              "environment",   "general_health"};
    return names[static_cast<std::size_t>(c)];
}

inline std::optional<NeutralSubcategory> parse_subcategory(std::string_view text) {
    std::string lower(text);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (std::size_t i = 0; i < kSubcategoryCount; ++i)
        if (lower == to_string(static_cast<NeutralSubcategory>(i)))
            return static_cast<NeutralSubcategory>(i);
    return std::nullopt;
}

struct PageNode {
    std::string id;
    Stance stance = Stance::Neutral;
    std::optional<NeutralSubcategory> subcategory;  // only meaningful when neutral
    std::uint64_t fan_count = 0;
    std::string title;
    std::string location_text;  // empty = absent
    std::optional<double> lat;
    std::optional<double> lon;

    friend bool operator==(const PageNode&, const PageNode&) = default;
};

struct FollowEdge {
    std::string source;
    std::string target;

    friend auto operator<=>(const FollowEdge&, const FollowEdge&) = default;
};

using NodeIndex = std::uint32_t;

struct DegreeTriple {
    std::uint32_t in = 0;
    std::uint32_t out = 0;
    std::uint32_t total = 0;
};

// Immutable after construction; safe for concurrent readers.
class Snapshot {
public:
    Snapshot() = default;

    const std::string& label() const { return label_; }
    const std::vector<PageNode>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    // Directed edges as node-index pairs, sorted by (source, target).
    const std::vector<std::pair<NodeIndex, NodeIndex>>& edges() const { return edges_; }

    std::optional<NodeIndex> index_of(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const PageNode& node(NodeIndex i) const { return nodes_[i]; }

    std::span<const NodeIndex> out_neighbors(NodeIndex i) const {
        return {out_adj_.data() + out_off_[i], out_off_[i + 1] - out_off_[i]};
    }
    std::span<const NodeIndex> in_neighbors(NodeIndex i) const {
        return {in_adj_.data() + in_off_[i], in_off_[i + 1] - in_off_[i]};
    }
    // Union of in- and out-neighbors, deduplicated, sorted.
    std::span<const NodeIndex> undirected_neighbors(NodeIndex i) const {
        return {und_adj_.data() + und_off_[i], und_off_[i + 1] - und_off_[i]};
    }

    std::uint32_t in_degree(NodeIndex i) const {
        return static_cast<std::uint32_t>(in_off_[i + 1] - in_off_[i]);
    }
    std::uint32_t out_degree(NodeIndex i) const {
        return static_cast<std::uint32_t>(out_off_[i + 1] - out_off_[i]);
    }
    std::uint32_t undirected_degree(NodeIndex i) const {
        return static_cast<std::uint32_t>(und_off_[i + 1] - und_off_[i]);
    }

    std::vector<FollowEdge> follow_edges() const {
        std::vector<FollowEdge> out;
        out.reserve(edges_.size());
        for (auto [s, t] : edges_) out.push_back({nodes_[s].id, nodes_[t].id});
        return out;
    }

    friend bool operator==(const Snapshot& a, const Snapshot& b) {
        return a.label_ == b.label_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

    friend Snapshot build_snapshot(std::string label, std::vector<PageNode> nodes,
                                   const std::vector<FollowEdge>& edges);

private:
    void build_adjacency() {
        const std::size_t n = nodes_.size();
        out_off_.assign(n + 1, 0);
        in_off_.assign(n + 1, 0);
        for (auto [s, t] : edges_) {
            ++out_off_[s + 1];
            ++in_off_[t + 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            out_off_[i + 1] += out_off_[i];
            in_off_[i + 1] += in_off_[i];
        }
        out_adj_.resize(edges_.size());
        in_adj_.resize(edges_.size());
        std::vector<std::size_t> oc(out_off_.begin(), out_off_.end() - 1);
        std::vector<std::size_t> ic(in_off_.begin(), in_off_.end() - 1);
        for (auto [s, t] : edges_) {
            out_adj_[oc[s]++] = t;
            in_adj_[ic[t]++] = s;
        }

        und_off_.assign(n + 1, 0);
        und_adj_.clear();
        und_adj_.reserve(edges_.size() * 2);
        std::vector<NodeIndex> merged;
        for (NodeIndex i = 0; i < n; ++i) {
            merged.clear();
            auto o = out_neighbors(i);
            auto in = in_neighbors(i);
            merged.insert(merged.end(), o.begin(), o.end());
            merged.insert(merged.end(), in.begin(), in.end());
            std::sort(merged.begin(), merged.end());
            merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
            und_adj_.insert(und_adj_.end(), merged.begin(), merged.end());
            und_off_[i + 1] = und_adj_.size();
        }
    }

    std::string label_;
    std::vector<PageNode> nodes_;  // sorted by id
    std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::size_t> out_off_, in_off_, und_off_;
    std::vector<NodeIndex> out_adj_, in_adj_, und_adj_;
};

// Validates and canonicalizes. Duplicate edges collapse to one; duplicate
// node ids, self-loops, and dangling endpoints are errors.
inline Snapshot build_snapshot(std::string label, std::vector<PageNode> nodes,
                               const std::vector<FollowEdge>& edges) {
    Snapshot s;
    s.label_ = std::move(label);
    std::sort(nodes.begin(), nodes.end(),
              [](const PageNode& a, const PageNode& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].id == nodes[i - 1].id)
            throw Error(ErrorKind::DuplicateNodeId, "node id '" + nodes[i].id + "'");
    s.nodes_ = std::move(nodes);
    s.index_.reserve(s.nodes_.size());
    for (NodeIndex i = 0; i < s.nodes_.size(); ++i) s.index_.emplace(s.nodes_[i].id, i);

    s.edges_.reserve(edges.size());
    for (const FollowEdge& e : edges) {
        if (e.source == e.target)
            throw Error(ErrorKind::SelfLoop, "edge " + e.source + " -> " + e.target);
        auto si = s.index_.find(e.source);
        auto ti = s.index_.find(e.target);
        if (si == s.index_.end() || ti == s.index_.end())
            throw Error(ErrorKind::DanglingEdge, "edge " + e.source + " -> " + e.target);
        s.edges_.emplace_back(si->second, ti->second);
    }
    std::sort(s.edges_.begin(), s.edges_.end());
    s.edges_.erase(std::unique(s.edges_.begin(), s.edges_.end()), s.edges_.end());
    s.build_adjacency();
    return s;
}

inline std::vector<DegreeTriple> degree_stats(const Snapshot& s) {
    std::vector<DegreeTriple> out(s.node_count());
    for (NodeIndex i = 0; i < s.node_count(); ++i) {
        out[i].in = s.in_degree(i);
        out[i].out = s.out_degree(i);
        out[i].total = out[i].in + out[i].out;
    }
    return out;
}

struct StanceTally {
    std::uint32_t node_count = 0;
    std::uint64_t fan_total = 0;
};

// Indexed by Stance value; the three tallies partition the node set.
inline std::array<StanceTally, 3> stance_counts(const Snapshot& s) {
    std::array<StanceTally, 3> out{};
    for (const PageNode& n : s.nodes()) {
        auto& t = out[static_cast<std::size_t>(n.stance)];
        ++t.node_count;
        t.fan_total += n.fan_count;
    }
    return out;
}

}  // namespace triarch
