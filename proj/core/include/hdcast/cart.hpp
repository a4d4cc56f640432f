#pragma once

#include "hdcast/design.hpp"

#include <string>
#include <vector>

namespace hdcast::ensemble {

struct CartNode {
    bool leaf = true;
    std::size_t feature = 0; // index into CartTree::columns
    double threshold = 0.0;  // rows with x <= threshold go left
    double value = 0.0;      // mean training target of the node
    std::size_t count = 0;
    int left = -1;
    int right = -1;
};

struct CartTree {
    std::vector<std::string> columns;
    std::vector<CartNode> nodes; // nodes[0] is the root
    int max_depth = 6;           // <= 0: unlimited
    std::size_t min_leaf = 5;

    std::size_t leaf_count() const;
    int depth() const;
};

/// Greedy variance-reduction tree. Thresholds are midpoints of adjacent distinct
/// sorted values; ties in gain go to the lower column index, then the lower threshold.
CartTree fit_cart(const DesignMatrix &dm, int max_depth = 6, std::size_t min_leaf = 5);

Eigen::VectorXd predict(const CartTree &tree, const DesignMatrix &dm);

} // namespace hdcast::ensemble
