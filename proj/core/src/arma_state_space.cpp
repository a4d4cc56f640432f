#include "hdcast/arma_state_space.hpp"

#include "hdcast/common.hpp"

#include <cmath>

namespace hdcast::arima {

std::vector<double> partials_to_ar(std::span<const double> partials) {
    std::vector<double> phi;
    phi.reserve(partials.size());
    for (std::size_t k = 0; k < partials.size(); ++k) {
        const double r = partials[k];
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
        next[k] = r;
        phi = std::move(next);
    }
    return phi;
}

std::vector<double> ar_to_partials(std::span<const double> phi_in) {
    std::vector<double> phi(phi_in.begin(), phi_in.end());
    std::vector<double> partials(phi.size());
    for (std::size_t k = phi.size(); k > 0; --k) {
        const double r = phi[k - 1];
        partials[k - 1] = r;
        if (std::abs(r) >= 1.0) {
            for (std::size_t j = 0; j + 1 < k; ++j) partials[j] = 0.0;
            return partials;
        }
        std::vector<double> prev(k - 1);
        for (std::size_t j = 0; j + 1 < k; ++j) prev[j] = (phi[j] + r * phi[k - 2 - j]) / (1.0 - r * r);
        phi = std::move(prev);
    }
    return partials;
}

namespace {

// Product of two polynomials given with constant term 1 and sign `sign` on the rest.
std::vector<double> multiply(std::span<const double> a, std::span<const double> b, int s, double sign) {
    const std::size_t len = a.size() + b.size() * static_cast<std::size_t>(s);
    std::vector<double> full_a(len + 1, 0.0), full_b(len + 1, 0.0), out(len + 1, 0.0);
    full_a[0] = full_b[0] = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) full_a[i + 1] = sign * a[i];
    for (std::size_t i = 0; i < b.size(); ++i) full_b[(i + 1) * static_cast<std::size_t>(s)] = sign * b[i];
    for (std::size_t i = 0; i <= len; ++i) {
        if (full_a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j <= len; ++j) out[i + j] += full_a[i] * full_b[j];
    }
    std::vector<double> c(len);
    for (std::size_t j = 1; j <= len; ++j) c[j - 1] = sign * out[j];
    return c;
}

// Rows of T*M for the companion transition with first column phi (zero padded).
Eigen::MatrixXd apply_transition(const Eigen::VectorXd &phi, const Eigen::MatrixXd &m) {
    const Eigen::Index r = m.rows();
    Eigen::MatrixXd out(r, m.cols());
    for (Eigen::Index i = 0; i < r; ++i) {
        out.row(i) = phi(i) * m.row(0);
        if (i + 1 < r) out.row(i) += m.row(i + 1);
    }
    return out;
}

struct Matrices {
    Eigen::VectorXd phi;
    Eigen::VectorXd r;
};

Matrices system(const ArmaPoly &poly) {
    const auto dim = static_cast<Eigen::Index>(poly.state_dim());
    Matrices m{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
    for (std::size_t j = 0; j < poly.phi.size(); ++j) m.phi(static_cast<Eigen::Index>(j)) = poly.phi[j];
    m.r(0) = 1.0;
    for (std::size_t j = 0; j < poly.theta.size(); ++j) m.r(static_cast<Eigen::Index>(j + 1)) = poly.theta[j];
    return m;
}

} // namespace

std::vector<double> multiply_ar(std::span<const double> a, std::span<const double> b, int s) {
    return multiply(a, b, s, -1.0);
}

std::vector<double> multiply_ma(std::span<const double> a, std::span<const double> b, int s) {
    return multiply(a, b, s, 1.0);
}

Eigen::MatrixXd stationary_covariance(const ArmaPoly &poly) {
    const auto m = system(poly);
    const Eigen::Index r = m.phi.size();
    Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(r, r);
    transition.col(0) = m.phi;
    for (Eigen::Index i = 0; i + 1 < r; ++i) transition(i, i + 1) = 1.0;
    // Doubling: P = sum_k T^k R R' T'^k, summing 2^j terms at step j.
    Eigen::MatrixXd p = m.r * m.r.transpose();
    Eigen::MatrixXd power = transition;
    for (int iter = 0; iter < 80; ++iter) {
        if (power.lpNorm<Eigen::Infinity>() < 1e-15) break;
        p += power * p * power.transpose();
        power = power * power;
        if (!p.allFinite()) throw ModelError("ARMA model is not stationary");
    }
    return 0.5 * (p + p.transpose());
}

KalmanOutput kalman_filter(const ArmaPoly &poly, const Eigen::MatrixXd &data) {
    const auto m = system(poly);
    const Eigen::Index r = m.phi.size();
    const Eigen::Index n = data.rows();
    KalmanOutput out;
    out.innovations.resize(n, data.cols());
    out.variances.resize(n);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, data.cols());
    Eigen::MatrixXd p = stationary_covariance(poly);
    const Eigen::MatrixXd rr = m.r * m.r.transpose();
    bool steady = false;
    Eigen::VectorXd gain(r);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::RowVectorXd v = data.row(t) - a.row(0);
        out.innovations.row(t) = v;
        if (!steady) {
            const double f = p(0, 0);
            out.variances(t) = f;
            const Eigen::MatrixXd tp = apply_transition(m.phi, p);
            gain = tp.col(0) / f;
            Eigen::MatrixXd next = apply_transition(m.phi, tp.transpose()).transpose();
            next += rr - gain * gain.transpose() * f;
            next = 0.5 * (next + next.transpose());
            // Once the covariance has converged, gain and F stay fixed.
            if (std::abs(f - 1.0) < 1e-13 && (next - p).lpNorm<Eigen::Infinity>() < 1e-13) steady = true;
            p = std::move(next);
        } else {
            out.variances(t) = 1.0;
        }
        a = apply_transition(m.phi, a) + gain * v;
    }
    out.state = std::move(a);
    out.state_cov = std::move(p);
    return out;
}

std::vector<double> psi_weights(std::span<const double> ar, std::span<const double> theta, std::size_t count) {
    std::vector<double> psi(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        double v = j == 0 ? 1.0 : (j <= theta.size() ? theta[j - 1] : 0.0);
        for (std::size_t i = 1; i <= std::min(j, ar.size()); ++i) v += ar[i - 1] * psi[j - i];
        psi[j] = v;
    }
    return psi;
}

} // namespace hdcast::arima
