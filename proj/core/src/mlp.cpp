#include "hdcast/mlp.hpp"

#include "hdcast/rng.hpp"

#include <cmath>

namespace hdcast::ensemble {

Eigen::VectorXd MlpWeights::flatten() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(size()));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < w1.cols(); ++j) {
        for (Eigen::Index i = 0; i < w1.rows(); ++i) flat(k++) = w1(i, j);
    }
    for (Eigen::Index i = 0; i < b1.size(); ++i) flat(k++) = b1(i);
    for (Eigen::Index i = 0; i < w2.size(); ++i) flat(k++) = w2(i);
    flat(k) = b2;
    return flat;
}

MlpWeights MlpWeights::unflatten(const Eigen::VectorXd &flat, Eigen::Index inputs, Eigen::Index hidden) {
    MlpWeights w;
    w.w1.resize(hidden, inputs);
    w.b1.resize(hidden);
    w.w2.resize(hidden);
    if (flat.size() != hidden * inputs + 2 * hidden + 1) throw std::invalid_argument("MlpWeights: wrong flat size");
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < inputs; ++j) {
        for (Eigen::Index i = 0; i < hidden; ++i) w.w1(i, j) = flat(k++);
    }
    for (Eigen::Index i = 0; i < hidden; ++i) w.b1(i) = flat(k++);
    for (Eigen::Index i = 0; i < hidden; ++i) w.w2(i) = flat(k++);
    w.b2 = flat(k);
    return w;
}

MlpWeights init_weights(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed) {
    Rng rng(seed);
    MlpWeights w;
    const double a1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    w.w1.resize(hidden, inputs);
    for (Eigen::Index j = 0; j < inputs; ++j) {
        for (Eigen::Index i = 0; i < hidden; ++i) w.w1(i, j) = rng.uniform(-a1, a1);
    }
    w.b1 = Eigen::VectorXd::Zero(hidden);
    w.w2.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) w.w2(i) = rng.uniform(-a2, a2);
    w.b2 = 0.0;
    return w;
}

Eigen::VectorXd mlp_forward(const MlpWeights &w, const Eigen::MatrixXd &z) {
    const Eigen::MatrixXd act = ((z * w.w1.transpose()).rowwise() + w.b1.transpose()).array().tanh();
    return (act * w.w2).array() + w.b2;
}

double mlp_loss(const MlpWeights &w, const Eigen::MatrixXd &z, const Eigen::VectorXd &y) {
    return 0.5 * (mlp_forward(w, z) - y).squaredNorm() / static_cast<double>(y.size());
}

Eigen::VectorXd mlp_gradient(const MlpWeights &w, const Eigen::MatrixXd &z, const Eigen::VectorXd &y) {
    const auto n = static_cast<double>(y.size());
    const Eigen::MatrixXd act = ((z * w.w1.transpose()).rowwise() + w.b1.transpose()).array().tanh();
    const Eigen::VectorXd err = ((act * w.w2).array() + w.b2 - y.array()).matrix() / n;
    MlpWeights g;
    g.w2 = act.transpose() * err;
    g.b2 = err.sum();
    // d loss / d pre-activation, n x hidden
    const Eigen::MatrixXd delta = (err * w.w2.transpose()).array() * (1.0 - act.array().square());
    g.w1 = delta.transpose() * z;
    g.b1 = delta.colwise().sum().transpose();
    return g.flatten();
}

MlpModel fit_mlp(const DesignMatrix &dm, const MlpOptions &options) {
    if (!dm.has_target()) throw ModelError("fit_mlp: design matrix has no target");
    if (options.hidden < 1 || options.epochs < 0 || !(options.learn_rate > 0.0)) {
        throw std::invalid_argument("fit_mlp: need hidden >= 1, epochs >= 0, learn_rate > 0");
    }
    MlpModel m;
    m.columns = dm.columns;
    m.options = options;
    const auto n = static_cast<double>(dm.rows());
    m.means = dm.x.colwise().mean().transpose();
    Eigen::MatrixXd z = dm.x.rowwise() - m.means.transpose();
    m.scales.resize(z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double sd = std::sqrt(z.col(j).squaredNorm() / n);
        m.scales(j) = sd > 0.0 ? sd : 1.0; // a constant column carries no signal
        z.col(j) /= m.scales(j);
    }
    m.target_mean = dm.target.mean();
    const double tsd = std::sqrt((dm.target.array() - m.target_mean).square().sum() / n);
    m.target_scale = tsd > 0.0 ? tsd : 1.0;
    const Eigen::VectorXd y = (dm.target.array() - m.target_mean) / m.target_scale;

    const auto inputs = z.cols();
    m.weights = init_weights(inputs, options.hidden, options.seed);
    Eigen::VectorXd flat = m.weights.flatten();
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        const auto w = MlpWeights::unflatten(flat, inputs, options.hidden);
        const double loss = mlp_loss(w, z, y);
        const Eigen::VectorXd g = mlp_gradient(w, z, y);
        if (!std::isfinite(loss) || !g.allFinite()) {
            throw ModelError("fit_mlp: training diverged at epoch " + std::to_string(epoch) +
                             "; try a smaller learn rate");
        }
        m.loss_history.push_back(loss);
        flat -= options.learn_rate * g;
    }
    m.weights = MlpWeights::unflatten(flat, inputs, options.hidden);
    if (!flat.allFinite()) throw ModelError("fit_mlp: training diverged; try a smaller learn rate");
    return m;
}

Eigen::VectorXd predict(const MlpModel &model, const DesignMatrix &dm) {
    Eigen::MatrixXd z = dm.select(model.columns);
    z = (z.rowwise() - model.means.transpose()).array().rowwise() / model.scales.transpose().array();
    return (mlp_forward(model.weights, z).array() * model.target_scale + model.target_mean).matrix();
}

} // namespace hdcast::ensemble
