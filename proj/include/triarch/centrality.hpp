#pragma once
// Betweenness centrality (Brandes accumulation over BFS shortest paths) and
// the affine size mapping used to turn scores into node radii. Sources are
// processed in parallel blocks; per-source dependency vectors are reduced
// in node-id order, so the result is identical for any thread count.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "triarch/error.hpp"
#include "triarch/graph.hpp"
#include "triarch/threads.hpp"

namespace triarch {

struct CentralityScores {
    std::vector<double> score;  // aligned to snapshot node order
    bool directed = true;
    bool normalized = false;
};

namespace detail {

// Single-source Brandes pass on the given adjacency view; adds nothing to
// `delta` for the source itself.
template <class NeighborsFn>
void brandes_source(NodeIndex source, NeighborsFn&& neighbors, std::vector<double>& delta,
                    std::vector<std::int32_t>& dist, std::vector<double>& sigma,
                    std::vector<NodeIndex>& order,
                    std::vector<std::vector<NodeIndex>>& preds) {
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);  // double: path counts explode on dense graphs
    for (auto& p : preds) p.clear();
    order.clear();

    dist[source] = 0;
    sigma[source] = 1.0;
    std::size_t head = 0;
    order.push_back(source);
    while (head < order.size()) {
        const NodeIndex v = order[head++];
        for (NodeIndex w : neighbors(v)) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                order.push_back(w);
            }
            if (dist[w] == dist[v] + 1) {
                sigma[w] += sigma[v];
                preds[w].push_back(v);
            }
        }
    }
    // Dependency accumulation in reverse BFS order.
    for (std::size_t i = order.size(); i-- > 1;) {
        const NodeIndex w = order[i];
        const double coeff = (1.0 + delta[w]) / sigma[w];
        for (NodeIndex v : preds[w]) delta[v] += sigma[v] * coeff;
    }
    delta[source] = 0.0;
}

}  // namespace detail

// score(v) = sum over (s,t), s != v != t, of sigma_st(v) / sigma_st, using
// unweighted shortest paths. Directed uses out-edges; undirected uses the
// deduplicated neighbor union with each unordered pair counted once.
// Normalization divides by (n-1)(n-2), halved in the undirected case.
inline CentralityScores betweenness(const Snapshot& s, bool directed = true,
                                    bool normalized = false, unsigned threads = 0) {
    const std::size_t n = s.node_count();
    CentralityScores out;
    out.directed = directed;
    out.normalized = normalized;
    out.score.assign(n, 0.0);
    if (n < 3) return out;

    const unsigned workers = resolve_threads(threads);
    // Per-source results for one block, indexed by source offset, so the
    // final reduction can run in source order regardless of scheduling.
    const std::size_t block = std::max<std::size_t>(workers * 8, 16);

    std::vector<std::vector<double>> deltas(std::min(block, n));
    for (auto& d : deltas) d.assign(n, 0.0);

    for (std::size_t begin = 0; begin < n; begin += block) {
        const std::size_t end = std::min(n, begin + block);
        parallel_blocks(end - begin, workers, [&](std::size_t lo, std::size_t hi) {
            std::vector<std::int32_t> dist(n);
            std::vector<double> sigma(n);
            std::vector<NodeIndex> order;
            order.reserve(n);
            std::vector<std::vector<NodeIndex>> preds(n);
            for (std::size_t k = lo; k < hi; ++k) {
                const NodeIndex source = static_cast<NodeIndex>(begin + k);
                auto neighbors = [&](NodeIndex v) {
                    return directed ? s.out_neighbors(v) : s.undirected_neighbors(v);
                };
                detail::brandes_source(source, neighbors, deltas[k], dist, sigma, order,
                                       preds);
            }
        });
        for (std::size_t k = 0; k < end - begin; ++k)
            for (std::size_t v = 0; v < n; ++v) out.score[v] += deltas[k][v];
    }

    if (!directed)
        for (double& v : out.score) v *= 0.5;
    if (normalized) {
        double pairs = static_cast<double>(n - 1) * static_cast<double>(n - 2);
        if (!directed) pairs *= 0.5;
        for (double& v : out.score) v /= pairs;
    }
    return out;
}

// Affine map of the score range onto [min_px, max_px]; a constant score
// field maps everything to min_px.
inline std::vector<double> size_scale(std::span<const double> scores, double min_px,
                                      double max_px) {
    if (!(max_px > min_px) || !(min_px > 0.0))
        throw Error(ErrorKind::BadArgs, "size range must satisfy max_px > min_px > 0");
    std::vector<double> out(scores.size(), min_px);
    if (scores.empty()) return out;
    double lo = scores[0], hi = scores[0];
    for (double v : scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) return out;
    const double k = (max_px - min_px) / (hi - lo);
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = min_px + (scores[i] - lo) * k;
    return out;
}

}  // namespace triarch
