#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace hdcast::optim {

using Objective = std::function<double(const Eigen::VectorXd &)>;

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace; // objective value per iteration
};

struct NelderMeadOptions {
    int max_iterations = 2000;
    double tolerance = 1e-8; // relative spread of simplex values
    double initial_step = 0.1;
};

Result nelder_mead(const Objective &f, const Eigen::VectorXd &start, const NelderMeadOptions &options = {});

struct BfgsOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-5;
    double value_tolerance = 1e-10;
    double fd_step = 1e-4;
};

/// Quasi-Newton minimisation with central-difference gradients and a
/// backtracking Armijo line search. Non-finite objective values count as +inf.
Result bfgs(const Objective &f, const Eigen::VectorXd &start, const BfgsOptions &options = {});

Eigen::VectorXd numeric_gradient(const Objective &f, const Eigen::VectorXd &x, double step);

/// Short text of the last few trace values for error messages.
std::string format_trace(const Result &r, std::size_t last = 5);

} // namespace hdcast::optim
