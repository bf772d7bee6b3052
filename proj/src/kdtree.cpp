#include "craterid/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "craterid/error.hpp"

namespace craterid {

namespace {

inline double dist2(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct Cand {
    double d2;
    uint32_t idx;
    bool operator<(const Cand& o) const { return d2 < o.d2 || (d2 == o.d2 && idx < o.idx); }
};

// max-heap on (d2, idx): top is the current worst
class Best {
public:
    explicit Best(size_t k) : k_(k) {}
    bool full() const { return heap_.size() >= k_; }
    double worst() const { return heap_.top().d2; }
    void offer(double d2, uint32_t idx) {
        const Cand c{d2, idx};
        if (!full()) {
            heap_.push(c);
        } else if (c < heap_.top()) {
            heap_.pop();
            heap_.push(c);
        }
    }
    std::vector<Hit> sorted() {
        std::vector<Cand> v;
        while (!heap_.empty()) {
            v.push_back(heap_.top());
            heap_.pop();
        }
        std::sort(v.begin(), v.end());
        std::vector<Hit> out;
        out.reserve(v.size());
        for (const auto& c : v) out.push_back({c.idx, std::sqrt(c.d2)});
        return out;
    }

private:
    size_t k_;
    std::priority_queue<Cand> heap_;
};

}  // namespace

void KdTree::build(const std::vector<double>& points, int dim, int leaf_size) {
    if (dim <= 0 || points.size() % size_t(dim) != 0)
        throw Error(ErrorCode::dimension_mismatch, "point array does not match dimension");
    dim_ = dim;
    pts_ = points;
    n_ = points.size() / dim;
    perm_.resize(n_);
    for (size_t i = 0; i < n_; ++i) perm_[i] = uint32_t(i);
    nodes_.clear();
    if (n_ > 0) build_rec(0, uint32_t(n_), std::max(1, leaf_size));
}

int32_t KdTree::build_rec(uint32_t begin, uint32_t end, int leaf_size) {
    const int32_t id = int32_t(nodes_.size());
    nodes_.push_back({});
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= uint32_t(leaf_size)) {
        nodes_[id] = node;
        return id;
    }
    int best = 0;
    double spread = -1.0;
    for (int d = 0; d < dim_; ++d) {
        double lo = INFINITY, hi = -INFINITY;
        for (uint32_t i = begin; i < end; ++i) {
            const double v = pts_[size_t(perm_[i]) * dim_ + d];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > spread) {
            spread = hi - lo;
            best = d;
        }
    }
    if (!(spread > 0.0)) {
        nodes_[id] = node;  // all points identical: leaf
        return id;
    }
    const uint32_t mid = begin + (end - begin) / 2;
    auto key = [&](uint32_t p) { return pts_[size_t(p) * dim_ + best]; };
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](uint32_t a, uint32_t b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
    node.split_dim = best;
    node.split = key(perm_[mid]);
    node.left = build_rec(begin, mid, leaf_size);
    node.right = build_rec(mid, end, leaf_size);
    nodes_[id] = node;
    return id;
}

std::vector<Hit> KdTree::knn(const double* q, size_t k) const {
    if (k == 0 || n_ == 0) return {};
    Best best(std::min(k, n_));
    // off[d]: query offset from the current cell along d; rd = |off|^2 is a
    // lower bound on the squared distance to anything in the cell
    std::vector<double> off(dim_, 0.0);
    auto rec = [&](auto&& self, int32_t id, double rd) -> void {
        const Node& nd = nodes_[id];
        if (nd.split_dim < 0) {
            for (uint32_t i = nd.begin; i < nd.end; ++i) {
                const uint32_t p = perm_[i];
                best.offer(dist2(q, &pts_[size_t(p) * dim_], dim_), p);
            }
            return;
        }
        const int d = nd.split_dim;
        const double diff = q[d] - nd.split;
        self(self, diff < 0.0 ? nd.left : nd.right, rd);
        const double old = off[d];
        const double far_rd = rd - old * old + diff * diff;
        // ties at equal distance still matter for the index tie-break
        if (best.full() && far_rd > best.worst()) return;
        off[d] = diff;
        self(self, diff < 0.0 ? nd.right : nd.left, far_rd);
        off[d] = old;
    };
    rec(rec, 0, 0.0);
    return best.sorted();
}

void KdTree::adopt(std::vector<double> points, int dim, std::vector<Node> nodes, std::vector<uint32_t> perm) {
    if (dim <= 0 || points.size() % size_t(dim) != 0 || perm.size() != points.size() / dim)
        throw Error(ErrorCode::dimension_mismatch, "inconsistent serialized tree");
    const uint32_t n = uint32_t(perm.size());
    for (const Node& nd : nodes) {
        if (nd.begin > nd.end || nd.end > n || nd.split_dim >= dim ||
            (nd.split_dim >= 0 && (nd.left < 0 || nd.right < 0 || size_t(nd.left) >= nodes.size() ||
                                   size_t(nd.right) >= nodes.size())))
            throw Error(ErrorCode::dimension_mismatch, "corrupt serialized tree node");
    }
    for (uint32_t p : perm)
        if (p >= n) throw Error(ErrorCode::dimension_mismatch, "corrupt serialized permutation");
    if (n > 0 && nodes.empty()) throw Error(ErrorCode::dimension_mismatch, "missing tree nodes");
    dim_ = dim;
    n_ = n;
    pts_ = std::move(points);
    nodes_ = std::move(nodes);
    perm_ = std::move(perm);
}

std::vector<Hit> brute_force_knn(const std::vector<double>& points, int dim, const double* q, size_t k) {
    const size_t n = points.size() / dim;
    std::vector<Cand> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = {dist2(q, &points[i * dim], dim), uint32_t(i)};
    const size_t m = std::min(k, n);
    std::partial_sort(all.begin(), all.begin() + m, all.end());
    std::vector<Hit> out;
    for (size_t i = 0; i < m; ++i) out.push_back({all[i].idx, std::sqrt(all[i].d2)});
    return out;
}

}  // namespace craterid
