#include "hdcast/artifacts.hpp"

#include <algorithm>

namespace hdcast::artifacts {

namespace {

Json vec(const Eigen::VectorXd &v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd to_vector(const Json &a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

Json mat(const Eigen::MatrixXd &m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd to_matrix(const Json &rows, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != static_cast<std::size_t>(cols)) throw DataError("artifact: ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

template <class F> auto guarded(const char *what, F &&f) {
    try {
        return f();
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("malformed ") + what + " artifact: " + e.what());
    }
}

} // namespace

std::string model_kind(const Json &j) {
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string()) {
        throw DataError("model artifact lacks a \"model\" field");
    }
    return j["model"].get<std::string>();
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

Json to_json(const linear::LinearFit &fit) {
    Json j;
    j["model"] = "stepwise";
    j["intercept"] = fit.intercept;
    Json coef = Json::object(), se = Json::object(), tv = Json::object();
    for (std::size_t k = 0; k < fit.names.size(); ++k) {
        coef[fit.names[k]] = fit.coefficients[k];
        se[fit.names[k]] = fit.std_errors[k];
        tv[fit.names[k]] = fit.t_values[k];
    }
    j["coefficients"] = coef;
    j["std_errors"] = se;
    j["t_values"] = tv;
    j["selection_order"] = fit.selection_order;
    j["r2"] = fit.r2;
    j["adj_r2"] = fit.adj_r2;
    j["sigma2"] = fit.sigma2;
    j["aic"] = fit.aic;
    j["n"] = fit.n;
    return j;
}

linear::LinearFit linear_from_json(const Json &j) {
    return guarded("linear", [&] {
        linear::LinearFit f;
        f.intercept = j.at("intercept").get<double>();
        for (const auto &[name, v] : j.at("coefficients").items()) {
            f.names.push_back(name);
            f.coefficients.push_back(v.get<double>());
            f.std_errors.push_back(j.at("std_errors").at(name).get<double>());
            f.t_values.push_back(j.at("t_values").at(name).get<double>());
        }
        f.selection_order = j.at("selection_order").get<std::vector<std::string>>();
        f.r2 = j.at("r2").get<double>();
        f.adj_r2 = j.at("adj_r2").get<double>();
        f.sigma2 = j.at("sigma2").get<double>();
        f.aic = j.at("aic").get<double>();
        f.n = j.at("n").get<std::size_t>();
        f.p = f.names.size();
        return f;
    });
}

Json to_json(const lasso::LarPath &path) {
    Json j;
    j["mode"] = path.mode == lasso::PathMode::lar ? "lar" : "lasso";
    j["columns"] = path.columns;
    j["means"] = vec(path.means);
    j["scales"] = vec(path.scales);
    j["target_mean"] = path.target_mean;
    Json bps = Json::array();
    for (const auto &bp : path.breakpoints) {
        Json b;
        b["lambda"] = bp.lambda;
        b["beta"] = vec(bp.beta);
        b["active"] = bp.active;
        b["event"] = bp.event;
        bps.push_back(b);
    }
    j["breakpoints"] = bps;
    return j;
}

lasso::LarPath lar_path_from_json(const Json &j) {
    return guarded("lasso path", [&] {
        lasso::LarPath p;
        p.mode = j.at("mode").get<std::string>() == "lar" ? lasso::PathMode::lar : lasso::PathMode::lasso;
        p.columns = j.at("columns").get<std::vector<std::string>>();
        p.means = to_vector(j.at("means"));
        p.scales = to_vector(j.at("scales"));
        p.target_mean = j.at("target_mean").get<double>();
        for (const auto &b : j.at("breakpoints")) {
            p.breakpoints.push_back({b.at("lambda").get<double>(), to_vector(b.at("beta")),
                                     b.at("active").get<std::vector<std::size_t>>(), b.at("event").get<std::string>()});
        }
        if (p.breakpoints.empty()) throw DataError("lasso path artifact has no breakpoints");
        return p;
    });
}

Json to_json(const lasso::Coefficients &coef) {
    Json j;
    j["intercept"] = coef.intercept;
    Json c = Json::object();
    for (std::size_t k = 0; k < coef.names.size(); ++k) c[coef.names[k]] = coef.values[k];
    j["coefficients"] = c;
    return j;
}

Json to_json(const arima::ArimaSpec &s) {
    return Json{{"p", s.p}, {"d", s.d}, {"q", s.q}, {"P", s.P}, {"D", s.D}, {"Q", s.Q}, {"s", s.s}};
}

arima::ArimaSpec spec_from_json(const Json &j) {
    return guarded("ARIMA spec", [&] {
        arima::ArimaSpec s;
        s.p = j.at("p").get<int>();
        s.d = j.at("d").get<int>();
        s.q = j.at("q").get<int>();
        s.P = j.at("P").get<int>();
        s.D = j.at("D").get<int>();
        s.Q = j.at("Q").get<int>();
        s.s = j.at("s").get<int>();
        s.validate();
        return s;
    });
}

Json to_json(const arima::RegArimaFit &fit) {
    Json j;
    j["model"] = "regarima";
    j["spec"] = to_json(fit.spec);
    j["label"] = fit.spec.to_string();
    Json beta = Json::object();
    for (std::size_t k = 0; k < fit.xreg_names.size(); ++k) beta[fit.xreg_names[k]] = fit.beta[k];
    j["beta"] = beta;
    j["ar"] = fit.ar;
    j["ma"] = fit.ma;
    j["sar"] = fit.sar;
    j["sma"] = fit.sma;
    j["has_mean"] = fit.has_mean;
    j["mean"] = fit.mean;
    j["sigma2"] = fit.sigma2;
    j["loglik"] = fit.loglik;
    j["aic"] = fit.aic;
    j["aicc"] = fit.aicc;
    j["n_effective"] = fit.n_effective;
    j["n_params"] = fit.n_params;
    j["transform"] = fit.transform == arima::Transform::sqrt ? "sqrt" : "none";
    j["warnings"] = fit.warnings;
    j["y"] = fit.y;
    j["xreg"] = mat(fit.xreg);
    return j;
}

arima::RegArimaFit regarima_from_json(const Json &j) {
    return guarded("regarima", [&] {
        arima::RegArimaFit f;
        f.spec = spec_from_json(j.at("spec"));
        for (const auto &[name, v] : j.at("beta").items()) {
            f.xreg_names.push_back(name);
            f.beta.push_back(v.get<double>());
        }
        f.ar = j.at("ar").get<std::vector<double>>();
        f.ma = j.at("ma").get<std::vector<double>>();
        f.sar = j.at("sar").get<std::vector<double>>();
        f.sma = j.at("sma").get<std::vector<double>>();
        f.has_mean = j.at("has_mean").get<bool>();
        f.mean = j.at("mean").get<double>();
        f.sigma2 = j.at("sigma2").get<double>();
        f.loglik = j.at("loglik").get<double>();
        f.aic = j.at("aic").get<double>();
        f.aicc = j.at("aicc").get<double>();
        f.n_effective = j.at("n_effective").get<std::size_t>();
        f.n_params = j.at("n_params").get<int>();
        f.transform = j.at("transform").get<std::string>() == "sqrt" ? arima::Transform::sqrt : arima::Transform::none;
        f.warnings = j.at("warnings").get<std::vector<std::string>>();
        f.y = j.at("y").get<std::vector<double>>();
        f.xreg = to_matrix(j.at("xreg"), static_cast<Eigen::Index>(f.xreg_names.size()));
        if (static_cast<std::size_t>(f.xreg.rows()) != f.y.size() && !f.xreg_names.empty()) {
            throw DataError("regarima artifact: xreg rows do not match y");
        }
        if (f.xreg_names.empty()) f.xreg.resize(static_cast<Eigen::Index>(f.y.size()), 0);
        if (static_cast<int>(f.ar.size()) != f.spec.p || static_cast<int>(f.ma.size()) != f.spec.q ||
            static_cast<int>(f.sar.size()) != f.spec.P || static_cast<int>(f.sma.size()) != f.spec.Q) {
            throw DataError("regarima artifact: coefficient counts do not match the spec");
        }
        return f;
    });
}

Json to_json(const arima::HarmonicFit &fit) {
    Json j;
    j["model"] = "harmonic";
    j["harmonics"] = fit.harmonics;
    j["period"] = fit.period;
    j["trend"] = fit.trend;
    j["first_t"] = fit.first_t;
    j["extra_names"] = fit.extra_names;
    Json by_k = Json::array();
    for (const auto &[k, a] : fit.aicc_by_k) by_k.push_back({{"harmonics", k}, {"aicc", a}});
    j["aicc_by_harmonics"] = by_k;
    j["regarima"] = to_json(fit.model);
    return j;
}

arima::HarmonicFit harmonic_from_json(const Json &j) {
    return guarded("harmonic", [&] {
        arima::HarmonicFit f;
        f.harmonics = j.at("harmonics").get<int>();
        f.period = j.at("period").get<double>();
        f.trend = j.at("trend").get<bool>();
        f.first_t = j.at("first_t").get<std::size_t>();
        f.extra_names = j.at("extra_names").get<std::vector<std::string>>();
        for (const auto &e : j.at("aicc_by_harmonics")) {
            f.aicc_by_k.emplace_back(e.at("harmonics").get<int>(), e.at("aicc").get<double>());
        }
        f.model = regarima_from_json(j.at("regarima"));
        return f;
    });
}

Json to_json(const ensemble::CartTree &tree) {
    Json j;
    j["columns"] = tree.columns;
    j["max_depth"] = tree.max_depth;
    j["min_leaf"] = tree.min_leaf;
    Json nodes = Json::array();
    for (const auto &n : tree.nodes) {
        if (n.leaf) {
            nodes.push_back({{"value", n.value}, {"count", n.count}});
        } else {
            nodes.push_back({{"column", tree.columns[n.feature]},
                             {"threshold", n.threshold},
                             {"value", n.value},
                             {"count", n.count},
                             {"left", n.left},
                             {"right", n.right}});
        }
    }
    j["nodes"] = nodes;
    return j;
}

ensemble::CartTree cart_from_json(const Json &j) {
    return guarded("CART", [&] {
        ensemble::CartTree t;
        t.columns = j.at("columns").get<std::vector<std::string>>();
        t.max_depth = j.at("max_depth").get<int>();
        t.min_leaf = j.at("min_leaf").get<std::size_t>();
        for (const auto &n : j.at("nodes")) {
            ensemble::CartNode node;
            node.value = n.at("value").get<double>();
            node.count = n.at("count").get<std::size_t>();
            if (n.contains("column")) {
                node.leaf = false;
                const auto col = n.at("column").get<std::string>();
                const auto it = std::find(t.columns.begin(), t.columns.end(), col);
                if (it == t.columns.end()) throw DataError("CART artifact: unknown column " + col);
                node.feature = static_cast<std::size_t>(it - t.columns.begin());
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
            }
            t.nodes.push_back(node);
        }
        const auto count = static_cast<int>(t.nodes.size());
        for (const auto &node : t.nodes) {
            if (!node.leaf && (node.left <= 0 || node.right <= 0 || node.left >= count || node.right >= count)) {
                throw DataError("CART artifact: child index out of range");
            }
        }
        if (t.nodes.empty()) throw DataError("CART artifact has no nodes");
        return t;
    });
}

Json to_json(const ensemble::MlpModel &m) {
    Json j;
    j["columns"] = m.columns;
    j["means"] = vec(m.means);
    j["scales"] = vec(m.scales);
    j["target_mean"] = m.target_mean;
    j["target_scale"] = m.target_scale;
    j["hidden"] = m.options.hidden;
    j["epochs"] = m.options.epochs;
    j["learn_rate"] = m.options.learn_rate;
    j["seed"] = m.options.seed;
    j["w1"] = mat(m.weights.w1);
    j["b1"] = vec(m.weights.b1);
    j["w2"] = vec(m.weights.w2);
    j["b2"] = m.weights.b2;
    j["final_loss"] = m.loss_history.empty() ? Json(nullptr) : Json(m.loss_history.back());
    return j;
}

ensemble::MlpModel mlp_from_json(const Json &j) {
    return guarded("MLP", [&] {
        ensemble::MlpModel m;
        m.columns = j.at("columns").get<std::vector<std::string>>();
        m.means = to_vector(j.at("means"));
        m.scales = to_vector(j.at("scales"));
        m.target_mean = j.at("target_mean").get<double>();
        m.target_scale = j.at("target_scale").get<double>();
        m.options.hidden = j.at("hidden").get<int>();
        m.options.epochs = j.at("epochs").get<int>();
        m.options.learn_rate = j.at("learn_rate").get<double>();
        m.options.seed = j.at("seed").get<std::uint64_t>();
        const auto inputs = static_cast<Eigen::Index>(m.columns.size());
        m.weights.w1 = to_matrix(j.at("w1"), inputs);
        m.weights.b1 = to_vector(j.at("b1"));
        m.weights.w2 = to_vector(j.at("w2"));
        m.weights.b2 = j.at("b2").get<double>();
        if (m.weights.w1.rows() != m.options.hidden || m.weights.b1.size() != m.options.hidden ||
            m.weights.w2.size() != m.options.hidden || m.means.size() != inputs || m.scales.size() != inputs) {
            throw DataError("MLP artifact: weight shapes do not match");
        }
        return m;
    });
}

Json to_json(const ensemble::EnsembleModel &model) {
    Json j;
    j["model"] = "ensemble";
    j["weights"] = model.weights;
    j["linear"] = to_json(model.linear);
    j["cart"] = to_json(model.cart);
    j["mlp"] = to_json(model.mlp);
    return j;
}

ensemble::EnsembleModel ensemble_from_json(const Json &j) {
    return guarded("ensemble", [&] {
        ensemble::EnsembleModel m;
        const auto w = j.at("weights").get<std::vector<double>>();
        if (w.size() != 3) throw DataError("ensemble artifact: need three weights");
        m.weights = {w[0], w[1], w[2]};
        m.linear = linear_from_json(j.at("linear"));
        m.cart = cart_from_json(j.at("cart"));
        m.mlp = mlp_from_json(j.at("mlp"));
        return m;
    });
}

Json to_json(const evaluation::EvalReport &r) {
    Json j;
    j["model"] = r.model;
    j["split"] = r.split;
    j["horizon"] = r.horizon;
    j["mape"] = r.mape;
    j["mape_at_h"] = r.mape_at_h;
    j["r2"] = r.r2;
    j["adj_r2"] = r.adj_r2;
    Json b = Json::object(), bh = Json::object();
    for (const auto &[k, v] : r.baseline_mapes) b[k] = v;
    for (const auto &[k, v] : r.baseline_mapes_at_h) bh[k] = v;
    j["baselines"] = b;
    j["baselines_at_h"] = bh;
    j["mape_by_step"] = r.mape_by_step;
    Json folds = Json::array();
    for (const auto &f : r.folds) {
        Json fj{{"fold", f.fold}, {"size", f.size}, {"ok", f.ok}};
        if (f.ok) {
            fj["r2"] = f.r2;
            fj["mape"] = f.mape;
        } else {
            fj["error"] = f.message;
        }
        folds.push_back(fj);
    }
    j["folds"] = folds;
    return j;
}

Json to_json(const synth::SynthParams &p) {
    Json lags = Json::object();
    for (const auto &[l, w] : p.conversion_lags) lags[std::to_string(l)] = w;
    return Json{{"seed", p.seed},
                {"n_weeks", p.n_weeks},
                {"start_year", p.start_year},
                {"showings_base", p.showings_base},
                {"trend_slope", p.trend_slope},
                {"seasonal_amplitude", p.seasonal_amplitude},
                {"peak_week", p.peak_week},
                {"conversion_lags", lags},
                {"conversion", p.conversion},
                {"noise_sd", p.noise_sd},
                {"shock_phi", p.shock_phi},
                {"shock_sd", p.shock_sd},
                {"sold_noise_sd", p.sold_noise_sd},
                {"on_market_base", p.on_market_base},
                {"on_market_sd", p.on_market_sd},
                {"on_market_phi", p.on_market_phi},
                {"delist_rate", p.delist_rate},
                {"burn_in", p.burn_in}};
}

synth::SynthParams synth_params_from_json(const Json &j) {
    return guarded("synth parameters", [&] {
        synth::SynthParams p;
        auto opt = [&](const char *key, auto &field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        for (const auto &[key, _] : j.items()) {
            static const std::vector<std::string> known{
                "seed", "n_weeks", "start_year", "showings_base", "trend_slope", "seasonal_amplitude",
                "peak_week", "conversion_lags", "conversion", "noise_sd", "shock_phi", "shock_sd",
                "sold_noise_sd", "on_market_base", "on_market_sd", "on_market_phi", "delist_rate", "burn_in"};
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                throw DataError("unknown synth parameter '" + key + "'");
            }
        }
        opt("seed", p.seed);
        opt("n_weeks", p.n_weeks);
        opt("start_year", p.start_year);
        opt("showings_base", p.showings_base);
        opt("trend_slope", p.trend_slope);
        opt("seasonal_amplitude", p.seasonal_amplitude);
        opt("peak_week", p.peak_week);
        opt("conversion", p.conversion);
        opt("noise_sd", p.noise_sd);
        opt("shock_phi", p.shock_phi);
        opt("shock_sd", p.shock_sd);
        opt("sold_noise_sd", p.sold_noise_sd);
        opt("on_market_base", p.on_market_base);
        opt("on_market_sd", p.on_market_sd);
        opt("on_market_phi", p.on_market_phi);
        opt("delist_rate", p.delist_rate);
        opt("burn_in", p.burn_in);
        if (j.contains("conversion_lags")) {
            p.conversion_lags.clear();
            for (const auto &[k, v] : j.at("conversion_lags").items()) p.conversion_lags[std::stoi(k)] = v.get<double>();
        }
        return p;
    });
}

Json to_json(const synth::Truth &t) {
    return Json{{"trend", t.trend},
                {"seasonal", t.seasonal},
                {"showings_noise", t.showings_noise},
                {"showings_mean", t.showings_mean},
                {"sold_expected", t.sold_expected},
                {"sold_noise", t.sold_noise},
                {"on_market_target", t.on_market_target}};
}

} // namespace hdcast::artifacts
