#include "hdcast/cart.hpp"

#include <algorithm>
#include <numeric>

namespace hdcast::ensemble {

std::size_t CartTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto &n) { return n.leaf; }));
}

int CartTree::depth() const {
    std::vector<int> level(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes[i].leaf) {
            level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
        }
    }
    return deepest;
}

namespace {

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

Split best_split(const DesignMatrix &dm, const std::vector<std::size_t> &rows, std::size_t min_leaf) {
    Split best;
    const std::size_t n = rows.size();
    double total = 0.0, total_sq = 0.0;
    for (auto r : rows) {
        const double y = dm.target(static_cast<Eigen::Index>(r));
        total += y;
        total_sq += y * y;
    }
    const double parent_sse = total_sq - total * total / static_cast<double>(n);
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < dm.cols(); ++f) {
        const auto col = static_cast<Eigen::Index>(f);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            return dm.x(static_cast<Eigen::Index>(a), col) < dm.x(static_cast<Eigen::Index>(b), col);
        });
        double left = 0.0, left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double y = dm.target(static_cast<Eigen::Index>(order[i]));
            left += y;
            left_sq += y * y;
            const double here = dm.x(static_cast<Eigen::Index>(order[i]), col);
            const double next = dm.x(static_cast<Eigen::Index>(order[i + 1]), col);
            const std::size_t nl = i + 1, nr = n - nl;
            if (here == next || nl < min_leaf || nr < min_leaf) continue;
            const double right = total - left, right_sq = total_sq - left_sq;
            const double sse = (left_sq - left * left / static_cast<double>(nl)) +
                               (right_sq - right * right / static_cast<double>(nr));
            const double gain = parent_sse - sse;
            if (gain > best.gain) {
                best = {true, f, 0.5 * (here + next), gain};
            }
        }
    }
    // Gains at rounding level are no real improvement.
    if (best.found && best.gain <= 1e-12 * std::max(1.0, std::abs(parent_sse))) best.found = false;
    return best;
}

int grow(CartTree &tree, const DesignMatrix &dm, const std::vector<std::size_t> &rows, int depth) {
    CartNode node;
    node.count = rows.size();
    double sum = 0.0;
    for (auto r : rows) sum += dm.target(static_cast<Eigen::Index>(r));
    node.value = sum / static_cast<double>(rows.size());
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    const bool depth_ok = tree.max_depth <= 0 || depth < tree.max_depth;
    if (!depth_ok || rows.size() < 2 * tree.min_leaf) return index;
    const Split split = best_split(dm, rows, tree.min_leaf);
    if (!split.found) return index;
    std::vector<std::size_t> left, right;
    for (auto r : rows) {
        (dm.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(split.feature)) <= split.threshold ? left : right)
            .push_back(r);
    }
    const int l = grow(tree, dm, left, depth + 1);
    const int r = grow(tree, dm, right, depth + 1);
    auto &self = tree.nodes[static_cast<std::size_t>(index)];
    self.leaf = false;
    self.feature = split.feature;
    self.threshold = split.threshold;
    self.left = l;
    self.right = r;
    return index;
}

} // namespace

CartTree fit_cart(const DesignMatrix &dm, int max_depth, std::size_t min_leaf) {
    if (!dm.has_target()) throw ModelError("fit_cart: design matrix has no target");
    if (min_leaf < 1) throw std::invalid_argument("fit_cart: min_leaf must be >= 1");
    if (dm.rows() < 2 * min_leaf) {
        throw std::invalid_argument("fit_cart: need at least 2 * min_leaf = " + std::to_string(2 * min_leaf) + " rows, got " +
                                    std::to_string(dm.rows()));
    }
    CartTree tree;
    tree.columns = dm.columns;
    tree.max_depth = max_depth;
    tree.min_leaf = min_leaf;
    std::vector<std::size_t> rows(dm.rows());
    std::iota(rows.begin(), rows.end(), 0);
    grow(tree, dm, rows, 0);
    return tree;
}

Eigen::VectorXd predict(const CartTree &tree, const DesignMatrix &dm) {
    const Eigen::MatrixXd x = dm.select(tree.columns);
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::size_t k = 0;
        while (!tree.nodes[k].leaf) {
            const auto &node = tree.nodes[k];
            k = static_cast<std::size_t>(x(i, static_cast<Eigen::Index>(node.feature)) <= node.threshold ? node.left
                                                                                                         : node.right);
        }
        out(i) = tree.nodes[k].value;
    }
    return out;
}

} // namespace hdcast::ensemble
