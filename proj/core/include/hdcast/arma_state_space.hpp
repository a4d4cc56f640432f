#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace hdcast::arima {

/// Expanded ARMA polynomials: phi(B) = 1 - sum phi_j B^j, theta(B) = 1 + sum theta_j B^j.
struct ArmaPoly {
    std::vector<double> phi;
    std::vector<double> theta;

    std::size_t state_dim() const { return std::max(phi.size(), theta.size() + 1); }
};

/// Durbin-Levinson map from partial autocorrelations in (-1, 1) to stationary AR coefficients.
std::vector<double> partials_to_ar(std::span<const double> partials);
/// Step-down inverse of partials_to_ar. Values with |r| >= 1 mean the polynomial is not stationary.
std::vector<double> ar_to_partials(std::span<const double> phi);

/// (1 - sum a_i B^i)(1 - sum b_i B^{s i}) as "1 - sum c_j B^j" coefficients c.
std::vector<double> multiply_ar(std::span<const double> a, std::span<const double> b, int s);
/// (1 + sum a_i B^i)(1 + sum b_i B^{s i}) as "1 + sum c_j B^j" coefficients c.
std::vector<double> multiply_ma(std::span<const double> a, std::span<const double> b, int s);

/// Stationary covariance of the Harvey state vector (unit innovation variance).
Eigen::MatrixXd stationary_covariance(const ArmaPoly &poly);

struct KalmanOutput {
    Eigen::MatrixXd innovations; // n x m, one column per filtered data column
    Eigen::VectorXd variances;   // F_t in units of sigma^2
    Eigen::MatrixXd state;       // r x m, predicted state for time n
    Eigen::MatrixXd state_cov;   // r x r
};

/// Filters every column of `data` through the same zero-mean ARMA model.
/// The gain sequence does not depend on the data, so one pass serves all columns.
KalmanOutput kalman_filter(const ArmaPoly &poly, const Eigen::MatrixXd &data);

/// psi_0 .. psi_{count-1} of theta(B) / ar(B), where ar(B) = 1 - sum ar_j B^j.
std::vector<double> psi_weights(std::span<const double> ar, std::span<const double> theta, std::size_t count);

} // namespace hdcast::arima
