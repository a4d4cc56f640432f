#pragma once

#include "hdcast/common.hpp"
#include "hdcast/design.hpp"
#include "hdcast/rng.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace testing {

// Random design with named columns x0..x{p-1}; target = x * beta + noise.
inline hdcast::DesignMatrix random_design(std::size_t n, std::size_t p, std::uint64_t seed,
                                          const std::vector<double> &beta = {}, double noise = 1.0) {
    hdcast::Rng rng(seed);
    hdcast::DesignMatrix dm;
    for (std::size_t j = 0; j < p; ++j) dm.columns.push_back("x" + std::to_string(j));
    dm.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    dm.target.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double y = noise * rng.normal();
        for (std::size_t j = 0; j < p; ++j) {
            const double v = rng.normal();
            dm.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            if (j < beta.size()) y += beta[j] * v;
        }
        dm.target(static_cast<Eigen::Index>(i)) = y;
        dm.time_index.push_back(i);
    }
    return dm;
}

inline std::vector<double> ar1_path(std::size_t n, double phi, double sd, hdcast::Rng &rng, std::size_t burn = 100) {
    std::vector<double> out;
    double z = 0.0;
    for (std::size_t t = 0; t < n + burn; ++t) {
        z = phi * z + sd * rng.normal();
        if (t >= burn) out.push_back(z);
    }
    return out;
}

inline std::vector<double> cumsum(const std::vector<double> &x, double start = 0.0) {
    std::vector<double> out;
    double s = start;
    for (double v : x) out.push_back(s += v);
    return out;
}

} // namespace testing
