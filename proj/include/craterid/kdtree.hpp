#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace craterid {

struct Hit {
    uint32_t index = 0;
    double distance = 0.0;
};

/// Exact k-nearest-neighbor tree, Euclidean. Ties break by point index so
/// results match a brute-force scan exactly.
class KdTree {
public:
    struct Node {
        int32_t split_dim = -1;  // -1 marks a leaf
        double split = 0.0;
        uint32_t begin = 0, end = 0;
        int32_t left = -1, right = -1;
    };

    void build(const std::vector<double>& points, int dim, int leaf_size = 8);
    std::vector<Hit> knn(const double* q, size_t k) const;

    int dim() const { return dim_; }
    size_t size() const { return n_; }
    const std::vector<double>& points() const { return pts_; }

    // exposed for serialization
    std::vector<Node>& nodes() { return nodes_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::vector<uint32_t>& perm() { return perm_; }
    const std::vector<uint32_t>& perm() const { return perm_; }
    void adopt(std::vector<double> points, int dim, std::vector<Node> nodes, std::vector<uint32_t> perm);

private:
    int32_t build_rec(uint32_t begin, uint32_t end, int leaf_size);

    int dim_ = 0;
    size_t n_ = 0;
    std::vector<double> pts_;
    std::vector<Node> nodes_;
    std::vector<uint32_t> perm_;
};

std::vector<Hit> brute_force_knn(const std::vector<double>& points, int dim, const double* q, size_t k);

}  // namespace craterid
