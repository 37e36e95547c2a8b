#pragma once
// Barnes-Hut quadtree for the layout's degree-weighted 1/d repulsion.
// theta = 0 degenerates to exact pairwise evaluation (the tree walks to the
// leaves), which is what the fidelity tests pin against an O(n^2) oracle.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "triarch/threads.hpp"

namespace triarch {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, const Vec2& v) { return {k * v.x, k * v.y}; }
    double norm2() const { return x * x + y * y; }
};

struct QuadTreeStats {
    std::uint64_t point_interactions = 0;  // leaf point vs query point
    std::uint64_t cell_interactions = 0;   // aggregated cell vs query point
};

class QuadTree {
public:
    // Positions need not be distinct: coincident points collect in a bucket
    // at the depth cap and interact pairwise.
    void build(std::span<const Vec2> positions, std::span<const double> masses) {
        positions_ = positions;
        masses_ = masses;
        nodes_.clear();
        perm_.resize(positions.size());
        slot_of_.resize(positions.size());
        for (std::uint32_t i = 0; i < positions.size(); ++i) perm_[i] = i;
        if (positions.empty()) return;

        double lo_x = positions[0].x, hi_x = positions[0].x;
        double lo_y = positions[0].y, hi_y = positions[0].y;
        for (const Vec2& p : positions) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
        const double cx = 0.5 * (lo_x + hi_x);
        const double cy = 0.5 * (lo_y + hi_y);
        const double half = 0.5 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-12;

        build_node({cx, cy}, half, 0, static_cast<std::uint32_t>(positions.size()), 0);
        for (std::uint32_t slot = 0; slot < perm_.size(); ++slot) slot_of_[perm_[slot]] = slot;
    }

    // Repulsion force on point i: sum over j != i of
    //   k_r * m_i * m_j * (p_i - p_j) / d^2        (magnitude k_r m_i m_j / d).
    // A cell is aggregated when (cell width / distance) < theta and the cell
    // does not contain i itself.
    Vec2 repulsion_at(std::uint32_t i, double theta, double k_r,
                      QuadTreeStats* stats = nullptr) const {
        Vec2 force{};
        if (nodes_.empty()) return force;
        walk(0, i, theta, force, stats);
        const double scale = k_r * masses_[i];
        return {scale * force.x, scale * force.y};
    }

private:
    struct Node {
        Vec2 center_of_mass{};
        double mass = 0.0;
        Vec2 cell_center{};
        double half = 0.0;
        std::uint32_t begin = 0, end = 0;  // range in perm_
        std::int32_t children[4] = {-1, -1, -1, -1};
        bool leaf = true;
    };

    static constexpr std::uint32_t kMaxDepth = 48;

    std::uint32_t build_node(Vec2 center, double half, std::uint32_t begin,
                             std::uint32_t end, std::uint32_t depth) {
        const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        {
            Node& n = nodes_[id];
            n.cell_center = center;
            n.half = half;
            n.begin = begin;
            n.end = end;
            double m = 0.0;
            Vec2 com{};
            for (std::uint32_t s = begin; s < end; ++s) {
                const std::uint32_t p = perm_[s];
                m += masses_[p];
                com.x += masses_[p] * positions_[p].x;
                com.y += masses_[p] * positions_[p].y;
            }
            n.mass = m;
            if (m > 0.0) {
                com.x /= m;
                com.y /= m;
            }
            n.center_of_mass = com;
        }
        if (end - begin <= 1 || depth >= kMaxDepth) return id;

        // Partition the slot range into the four quadrants.
        auto quadrant = [&](std::uint32_t p) {
            const int qx = positions_[p].x >= center.x ? 1 : 0;
            const int qy = positions_[p].y >= center.y ? 1 : 0;
            return qy * 2 + qx;
        };
        std::uint32_t bounds[5];
        bounds[0] = begin;
        auto* base = perm_.data();
        std::uint32_t cursor = begin;
        for (int q = 0; q < 4; ++q) {
            auto* mid = std::partition(base + cursor, base + end,
                                       [&](std::uint32_t p) { return quadrant(p) == q; });
            cursor = static_cast<std::uint32_t>(mid - base);
            bounds[q + 1] = cursor;
        }

        nodes_[id].leaf = false;
        const double h = half * 0.5;
        const Vec2 centers[4] = {{center.x - h, center.y - h},
                                 {center.x + h, center.y - h},
                                 {center.x - h, center.y + h},
                                 {center.x + h, center.y + h}};
        for (int q = 0; q < 4; ++q) {
            if (bounds[q + 1] > bounds[q]) {
                const std::uint32_t child =
                    build_node(centers[q], h, bounds[q], bounds[q + 1], depth + 1);
                nodes_[id].children[q] = static_cast<std::int32_t>(child);
            }
        }
        return id;
    }

    void point_interaction(std::uint32_t i, std::uint32_t j, Vec2& force,
                           QuadTreeStats* stats) const {
        Vec2 d = positions_[i] - positions_[j];
        double d2 = d.norm2();
        if (d2 < 1e-18) {
            // Coincident points: deterministic epsilon offset keeps the step
            // finite; callers jitter positions so this is a guard, not a path.
            d = {i > j ? 1e-9 : -1e-9, 0.0};
            d2 = 1e-18;
        }
        const double f = masses_[j] / d2;
        force.x += f * d.x;
        force.y += f * d.y;
        if (stats) ++stats->point_interactions;
    }

    void walk(std::uint32_t node_id, std::uint32_t i, double theta, Vec2& force,
              QuadTreeStats* stats) const {
        const Node& n = nodes_[node_id];
        const std::uint32_t slot = slot_of_[i];
        const bool contains_i = slot >= n.begin && slot < n.end;

        if (n.leaf) {
            for (std::uint32_t s = n.begin; s < n.end; ++s) {
                const std::uint32_t j = perm_[s];
                if (j != i) point_interaction(i, j, force, stats);
            }
            return;
        }
        if (!contains_i && theta > 0.0) {
            const Vec2 d = positions_[i] - n.center_of_mass;
            const double d2 = d.norm2();
            const double width = 2.0 * n.half;
            if (width * width < theta * theta * d2) {
                const double f = n.mass / d2;
                force.x += f * d.x;
                force.y += f * d.y;
                if (stats) ++stats->cell_interactions;
                return;
            }
        }
        for (int q = 0; q < 4; ++q)
            if (n.children[q] >= 0)
                walk(static_cast<std::uint32_t>(n.children[q]), i, theta, force, stats);
    }

    std::span<const Vec2> positions_;
    std::span<const double> masses_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> perm_;     // point ids in tree order
    std::vector<std::uint32_t> slot_of_;  // inverse of perm_
};

// Per-node repulsion forces; parallel over nodes, each force written to its
// own slot, so the output is independent of the thread count.
inline std::vector<Vec2> barnes_hut_repulsion(std::span<const Vec2> positions,
                                              std::span<const double> masses, double theta,
                                              double k_r, unsigned threads = 0,
                                              QuadTreeStats* stats = nullptr) {
    std::vector<Vec2> forces(positions.size());
    if (positions.size() < 2) return forces;
    QuadTree tree;
    tree.build(positions, masses);

    if (stats) {
        // Stats collection stays single-threaded; the counter is shared.
        for (std::uint32_t i = 0; i < positions.size(); ++i)
            forces[i] = tree.repulsion_at(i, theta, k_r, stats);
        return forces;
    }
    parallel_blocks(positions.size(), resolve_threads(threads),
                    [&](std::size_t lo, std::size_t hi) {
                        for (std::size_t i = lo; i < hi; ++i)
                            forces[i] = tree.repulsion_at(static_cast<std::uint32_t>(i),
                                                          theta, k_r);
                    });
    return forces;
}

}  // namespace triarch
