#include "hef/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

namespace hef {

namespace {

constexpr double kDiag = 1.4142135623730951;

struct Grid {
    int w = 0, h = 0; // padded working canvas
    std::vector<std::uint8_t> px;
    bool at(int x, int y) const { return px[static_cast<std::size_t>(y) * w + x] != 0; }
    std::uint8_t& ref(int x, int y) { return px[static_cast<std::size_t>(y) * w + x]; }
};

// One Guo-Hall subiteration; returns the number of deletions.
int thin_pass(Grid& g, int iter) {
    std::vector<std::pair<int, int>> doomed;
    for (int y = 1; y < g.h - 1; ++y)
        for (int x = 1; x < g.w - 1; ++x) {
            if (!g.at(x, y))
                continue;
            const bool p2 = g.at(x, y - 1);
            const bool p3 = g.at(x + 1, y - 1);
            const bool p4 = g.at(x + 1, y);
            const bool p5 = g.at(x + 1, y + 1);
            const bool p6 = g.at(x, y + 1);
            const bool p7 = g.at(x - 1, y + 1);
            const bool p8 = g.at(x - 1, y);
            const bool p9 = g.at(x - 1, y - 1);

            const int c = (!p2 && (p3 || p4)) + (!p4 && (p5 || p6)) + (!p6 && (p7 || p8)) +
                          (!p8 && (p9 || p2));
            const int n1 = (p9 || p2) + (p3 || p4) + (p5 || p6) + (p7 || p8);
            const int n2 = (p2 || p3) + (p4 || p5) + (p6 || p7) + (p8 || p9);
            const int n = std::min(n1, n2);
            const bool m = iter == 0 ? ((p6 || p7 || !p9) && p8) : ((p2 || p3 || !p5) && p4);
            if (c == 1 && n >= 2 && n <= 3 && !m)
                doomed.push_back({x, y});
        }
    for (auto [x, y] : doomed)
        g.ref(x, y) = 0;
    return static_cast<int>(doomed.size());
}

// Every path in the skeleton graph has length a + b*sqrt(2) for integer edge
// counts a (axis) and b (diagonal). Keeping the counts instead of a running
// double makes both diameter searches return bit-identical values regardless
// of summation order.
struct PathLen {
    int a = 0; // unit edges
    int b = 0; // diagonal edges
};

// sign of (p - q) as a + b*sqrt(2), decided in exact integer arithmetic
bool pathlen_less(const PathLen& p, const PathLen& q) {
    const long long da = p.a - q.a;
    const long long db = p.b - q.b;
    if (da >= 0 && db >= 0)
        return false;
    if (da <= 0 && db <= 0)
        return da != 0 || db != 0;
    // mixed signs: compare da against -db*sqrt(2) by squaring
    if (da < 0)
        return 2 * db * db < da * da; // da + db*sqrt(2) < 0 iff da^2 > 2 db^2
    return da * da < 2 * db * db;
}

double pathlen_value(const PathLen& p) {
    return static_cast<double>(p.a) + static_cast<double>(p.b) * kDiag;
}

struct SkeletonGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, bool>>> adj; // (node, diagonal?)
};

SkeletonGraph build_graph(const std::vector<std::pair<int, int>>& skeleton) {
    SkeletonGraph g;
    g.n = static_cast<int>(skeleton.size());
    std::unordered_map<long long, int> index;
    index.reserve(skeleton.size() * 2);
    auto key = [](int x, int y) {
        return (static_cast<long long>(y) << 32) | static_cast<unsigned int>(x);
    };
    for (int i = 0; i < g.n; ++i)
        index[key(skeleton[i].first, skeleton[i].second)] = i;
    g.adj.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const auto [x, y] = skeleton[i];
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0)
                    continue;
                auto it = index.find(key(x + dx, y + dy));
                if (it != index.end())
                    g.adj[i].push_back({it->second, dx != 0 && dy != 0});
            }
    }
    return g;
}

// farthest node from src and its distance (Dijkstra; weights are positive)
std::pair<int, PathLen> farthest_from(const SkeletonGraph& g, int src) {
    std::vector<PathLen> d(g.n);
    std::vector<std::uint8_t> reached(g.n, 0);
    struct HeapItem {
        PathLen len;
        int node;
    };
    auto heap_after = [](const HeapItem& x, const HeapItem& y) {
        return pathlen_less(y.len, x.len); // min-heap
    };
    std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(heap_after)> heap(heap_after);
    reached[src] = 1;
    heap.push({PathLen{}, src});
    while (!heap.empty()) {
        auto [len, u] = heap.top();
        heap.pop();
        if (pathlen_less(d[u], len))
            continue;
        for (const auto& [v, diag] : g.adj[u]) {
            PathLen cand = len;
            (diag ? cand.b : cand.a) += 1;
            if (!reached[v] || pathlen_less(cand, d[v])) {
                reached[v] = 1;
                d[v] = cand;
                heap.push({cand, v});
            }
        }
    }
    int best = src;
    for (int i = 0; i < g.n; ++i)
        if (reached[i] && pathlen_less(d[best], d[i]))
            best = i;
    return {best, d[best]};
}

} // namespace

std::vector<std::pair<int, int>> skeletonize(const Component& group) {
    if (group.runs.empty())
        return {};
    // 1-px padding so the neighborhood reads never leave the canvas
    Grid g;
    g.w = group.max_x - group.min_x + 3;
    g.h = group.max_y - group.min_y + 3;
    g.px.assign(static_cast<std::size_t>(g.w) * g.h, 0);
    for (const PixelRun& r : group.runs)
        for (int x = r.x0; x <= r.x1; ++x)
            g.ref(x - group.min_x + 1, r.y - group.min_y + 1) = 1;

    while (thin_pass(g, 0) + thin_pass(g, 1) > 0) {
    }

    std::vector<std::pair<int, int>> out;
    for (int y = 1; y < g.h - 1; ++y)
        for (int x = 1; x < g.w - 1; ++x)
            if (g.at(x, y))
                out.push_back({x + group.min_x - 1, y + group.min_y - 1});
    return out;
}

double skeleton_length_floyd_warshall(const std::vector<std::pair<int, int>>& skeleton) {
    const SkeletonGraph g = build_graph(skeleton);
    if (g.n < 2)
        return 0.0;
    const std::size_t n = static_cast<std::size_t>(g.n);
    std::vector<PathLen> dist(n * n);
    std::vector<std::uint8_t> known(n * n, 0);
    for (int i = 0; i < g.n; ++i) {
        known[static_cast<std::size_t>(i) * n + i] = 1;
        for (const auto& [j, diag] : g.adj[i]) {
            PathLen e;
            (diag ? e.b : e.a) = 1;
            dist[static_cast<std::size_t>(i) * n + j] = e;
            known[static_cast<std::size_t>(i) * n + j] = 1;
        }
    }
    for (int k = 0; k < g.n; ++k) {
        const std::size_t rk = static_cast<std::size_t>(k) * n;
        for (int i = 0; i < g.n; ++i) {
            const std::size_t ri = static_cast<std::size_t>(i) * n;
            if (!known[ri + k])
                continue;
            const PathLen dik = dist[ri + k];
            for (int j = 0; j < g.n; ++j) {
                if (!known[rk + j])
                    continue;
                PathLen cand = dik;
                cand.a += dist[rk + j].a;
                cand.b += dist[rk + j].b;
                if (!known[ri + j] || pathlen_less(cand, dist[ri + j])) {
                    dist[ri + j] = cand;
                    known[ri + j] = 1;
                }
            }
        }
    }
    PathLen best;
    for (std::size_t i = 0; i < n * n; ++i)
        if (known[i] && pathlen_less(best, dist[i]))
            best = dist[i];
    return pathlen_value(best);
}

double skeleton_length_two_sweep(const std::vector<std::pair<int, int>>& skeleton) {
    const SkeletonGraph g = build_graph(skeleton);
    if (g.n < 2)
        return 0.0;
    const auto [far_node, unused] = farthest_from(g, 0);
    return pathlen_value(farthest_from(g, far_node).second);
}

double skeleton_length(const std::vector<std::pair<int, int>>& skeleton) {
    if (skeleton.size() <= 1500)
        return skeleton_length_floyd_warshall(skeleton);
    return skeleton_length_two_sweep(skeleton);
}

} // namespace hef
