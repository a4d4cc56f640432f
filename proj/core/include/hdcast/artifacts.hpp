#pragma once

#include "hdcast/arima.hpp"
#include "hdcast/ensemble.hpp"
#include "hdcast/evaluation.hpp"
#include "hdcast/harmonic.hpp"
#include "hdcast/lasso.hpp"
#include "hdcast/linear.hpp"
#include "hdcast/synth.hpp"

#include <nlohmann/json.hpp>

namespace hdcast::artifacts {

using Json = nlohmann::ordered_json;

Json to_json(const linear::LinearFit &fit);
linear::LinearFit linear_from_json(const Json &j);

Json to_json(const lasso::LarPath &path);
lasso::LarPath lar_path_from_json(const Json &j);
Json to_json(const lasso::Coefficients &coef);

Json to_json(const arima::ArimaSpec &spec);
arima::ArimaSpec spec_from_json(const Json &j);
Json to_json(const arima::RegArimaFit &fit);
arima::RegArimaFit regarima_from_json(const Json &j);
Json to_json(const arima::HarmonicFit &fit);
arima::HarmonicFit harmonic_from_json(const Json &j);

Json to_json(const ensemble::CartTree &tree);
ensemble::CartTree cart_from_json(const Json &j);
Json to_json(const ensemble::MlpModel &model);
ensemble::MlpModel mlp_from_json(const Json &j);
Json to_json(const ensemble::EnsembleModel &model);
ensemble::EnsembleModel ensemble_from_json(const Json &j);

Json to_json(const evaluation::EvalReport &report);

Json to_json(const synth::SynthParams &params);
synth::SynthParams synth_params_from_json(const Json &j);
Json to_json(const synth::Truth &truth);

/// The "model" discriminator of a model artifact; throws DataError if absent.
std::string model_kind(const Json &j);

/// 2-space indented dump with a trailing newline.
std::string dump(const Json &j);

} // namespace hdcast::artifacts
