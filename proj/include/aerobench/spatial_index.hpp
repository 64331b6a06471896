#pragma once

#include <aerobench/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace aerobench {

/// Static k-d tree over a fixed point set. Queries are exact: the k nearest
/// points by Euclidean distance, ties broken by lower point index.
/// Immutable after construction; concurrent queries are safe.
class SpatialIndex
{
public:
    explicit SpatialIndex(std::vector<Vec3> points) : points_(std::move(points))
    {
        if (points_.empty()) {
            fail(ErrorCode::EmptyPointSet, "cannot index an empty point set");
        }
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::uint32_t{0});
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, static_cast<std::uint32_t>(points_.size()));
    }

    std::size_t size() const { return points_.size(); }
    const std::vector<Vec3>& points() const { return points_; }
    const Vec3& point(std::size_t i) const { return points_[i]; }

    struct Neighbors
    {
        std::vector<std::size_t> indices;
        std::vector<double> distances;
    };

    /// Fills `out` with min(k, N) neighbors sorted by nondecreasing distance.
    void knn(const Vec3& query, std::size_t k, Neighbors& out) const
    {
        if (k == 0) {
            fail(ErrorCode::InvalidArgument, "k must be at least 1");
        }
        k = std::min(k, points_.size());
        std::vector<Candidate> best;
        best.reserve(k + 1);
        search(0, query, k, best);
        out.indices.resize(best.size());
        out.distances.resize(best.size());
        for (std::size_t i = 0; i < best.size(); ++i) {
            out.indices[i] = best[i].index;
            out.distances[i] = std::sqrt(best[i].d2);
        }
    }

    Neighbors knn(const Vec3& query, std::size_t k) const
    {
        Neighbors n;
        knn(query, k, n);
        return n;
    }

private:
    static constexpr std::uint32_t kLeafSize = 12;

    struct Node
    {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int axis = 0;
        double split = 0.0;
        Vec3 lo;
        Vec3 hi;
    };

    struct Candidate
    {
        double d2;
        std::size_t index;
        bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end)
    {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back({});
        Node node;
        node.begin = begin;
        node.end = end;
        node.lo = node.hi = points_[order_[begin]];
        for (std::uint32_t i = begin; i < end; ++i) {
            const Vec3& p = points_[order_[i]];
            for (std::size_t a = 0; a < 3; ++a) {
                node.lo[a] = std::min(node.lo[a], p[a]);
                node.hi[a] = std::max(node.hi[a], p[a]);
            }
        }
        if (end - begin > kLeafSize) {
            int axis = 0;
            double extent = -1.0;
            for (int a = 0; a < 3; ++a) {
                const double e = node.hi[a] - node.lo[a];
                if (e > extent) {
                    extent = e;
                    axis = a;
                }
            }
            if (extent > 0.0) {
                const std::uint32_t mid = begin + (end - begin) / 2;
                std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                                 [&](std::uint32_t a, std::uint32_t b) {
                                     const double pa = points_[a][axis];
                                     const double pb = points_[b][axis];
                                     return pa < pb || (pa == pb && a < b);
                                 });
                node.axis = axis;
                node.split = points_[order_[mid]][axis];
                node.left = build(begin, mid);
                node.right = build(mid, end);
            }
        }
        nodes_[id] = node;
        return id;
    }

    static double box_distance2(const Node& n, const Vec3& q)
    {
        double d2 = 0.0;
        for (std::size_t a = 0; a < 3; ++a) {
            const double d = q[a] < n.lo[a] ? n.lo[a] - q[a] : (q[a] > n.hi[a] ? q[a] - n.hi[a] : 0.0);
            d2 += d * d;
        }
        return d2;
    }

    void offer(std::vector<Candidate>& best, std::size_t k, Candidate c) const
    {
        if (best.size() == k && !(c < best.back())) {
            return;
        }
        auto pos = std::upper_bound(best.begin(), best.end(), c);
        best.insert(pos, c);
        if (best.size() > k) {
            best.pop_back();
        }
    }

    void search(std::int32_t id, const Vec3& q, std::size_t k, std::vector<Candidate>& best) const
    {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        // Boxes at exactly the current worst distance are still visited so
        // that equal-distance points with lower indices are found.
        if (best.size() == k && box_distance2(n, q) > best.back().d2) {
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const std::uint32_t p = order_[i];
                offer(best, k, {distance2(points_[p], q), p});
            }
            return;
        }
        const bool go_left_first = q[static_cast<std::size_t>(n.axis)] < n.split;
        search(go_left_first ? n.left : n.right, q, k, best);
        search(go_left_first ? n.right : n.left, q, k, best);
    }

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

inline SpatialIndex build_index(std::vector<Vec3> points) { return SpatialIndex(std::move(points)); }

inline SpatialIndex::Neighbors knn(const SpatialIndex& index, const Vec3& query, std::size_t k)
{
    return index.knn(query, k);
}

} // namespace aerobench
