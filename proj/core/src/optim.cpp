#include "hdcast/optim.hpp"

#include "hdcast/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdcast::optim {

namespace {

double safe(const Objective &f, const Eigen::VectorXd &x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

} // namespace

Result nelder_mead(const Objective &f, const Eigen::VectorXd &start, const NelderMeadOptions &options) {
    const Eigen::Index n = start.size();
    Result r;
    if (n == 0) {
        r.x = start;
        r.value = safe(f, start);
        r.converged = true;
        return r;
    }
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), start);
    std::vector<double> values(simplex.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        auto &v = simplex[static_cast<std::size_t>(i + 1)];
        v(i) += start(i) != 0.0 ? options.initial_step * std::max(1.0, std::abs(start(i))) : options.initial_step;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = safe(f, simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        r.trace.push_back(values[best]);
        const double spread = std::abs(values[worst] - values[best]);
        if (std::isfinite(values[worst]) && spread <= options.tolerance * (std::abs(values[best]) + options.tolerance)) {
            r.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i : order) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);
        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double fr = safe(f, reflected);
        if (fr < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = safe(f, expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = safe(f, contracted);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = safe(f, simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    r.x = simplex[best];
    r.value = values[best];
    return r;
}

Eigen::VectorXd numeric_gradient(const Objective &f, const Eigen::VectorXd &x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x(i)));
        probe(i) = x(i) + h;
        const double up = safe(f, probe);
        probe(i) = x(i) - h;
        const double down = safe(f, probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

Result bfgs(const Objective &f, const Eigen::VectorXd &start, const BfgsOptions &options) {
    const Eigen::Index n = start.size();
    Result r;
    r.x = start;
    r.value = safe(f, start);
    if (!std::isfinite(r.value)) return r;
    if (n == 0) {
        r.converged = true;
        return r;
    }
    Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = numeric_gradient(f, r.x, options.fd_step);
    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
        r.trace.push_back(r.value);
        if (!g.allFinite()) break;
        if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            r.converged = true;
            break;
        }
        Eigen::VectorXd dir = -inv_h * g;
        if (dir.dot(g) >= 0.0) {
            inv_h.setIdentity();
            dir = -g;
        }
        double t = 1.0;
        Eigen::VectorXd next;
        double next_value = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            next = r.x + t * dir;
            next_value = safe(f, next);
            if (next_value <= r.value + 1e-4 * t * dir.dot(g)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // A stalled line search at a flat point is treated as convergence.
            r.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * options.gradient_tolerance;
            break;
        }
        const Eigen::VectorXd g_next = numeric_gradient(f, next, options.fd_step);
        const Eigen::VectorXd s = next - r.x;
        const Eigen::VectorXd y = g_next - g;
        const double improvement = r.value - next_value;
        r.x = next;
        r.value = next_value;
        g = g_next;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        if (improvement <= options.value_tolerance * (std::abs(r.value) + options.value_tolerance)) {
            r.converged = true;
            break;
        }
    }
    return r;
}

std::string format_trace(const Result &r, std::size_t last) {
    std::string out = "iterations=" + std::to_string(r.iterations) + " trace=[";
    const std::size_t first = r.trace.size() > last ? r.trace.size() - last : 0;
    for (std::size_t i = first; i < r.trace.size(); ++i) {
        if (i > first) out += ", ";
        out += format_significant(r.trace[i], 10);
    }
    return out + "]";
}

} // namespace hdcast::optim
