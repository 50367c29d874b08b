#include "gtplan/prediction.hpp"

#include <cmath>
#include <stdexcept>

#include "gtplan/errors.hpp"
#include "gtplan/rng.hpp"
#include "json_util.hpp"

namespace gtplan {

void PredictionSet::validate(int horizon) const {
  if (trajectories.empty()) throw ParseError("predictions: need at least one trajectory");
  if (rho <= 0.0) throw ParseError("predictions.rho: must be > 0");
  double sum_p = 0.0;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const PredictedTrajectory& tr = trajectories[i];
    const std::string ctx = "predictions.trajectories[" + std::to_string(i) + "]";
    if (static_cast<int>(tr.points.size()) != horizon) {
      throw ParseError(ctx + ".points: expected " + std::to_string(horizon) +
                       " entries");
    }
    if (tr.variances.size() != tr.points.size()) {
      throw ParseError(ctx + ".variances: length must match points");
    }
    for (double v : tr.variances) {
      if (v <= 0.0) throw ParseError(ctx + ".variances: must be > 0");
    }
    if (tr.probability < 0.0 || tr.probability > 1.0) {
      throw ParseError(ctx + ".probability: must lie in [0, 1]");
    }
    sum_p += tr.probability;
  }
  if (sum_p <= 0.0) throw ParseError("predictions: probabilities sum to 0");
  if (sum_p > 1.0 + 1e-9) {
    throw ParseError("predictions: probabilities sum above 1");
  }
}

void PredictionSet::normalize_probabilities() {
  double sum = 0.0;
  for (const PredictedTrajectory& tr : trajectories) sum += tr.probability;
  if (sum <= 0.0) return;
  for (PredictedTrajectory& tr : trajectories) tr.probability /= sum;
}

bool in_confidence_range(const PredictedTrajectory& pred, int t, double s_opp,
                         double rho) {
  if (t < 1 || t > static_cast<int>(pred.points.size())) {
    throw std::invalid_argument("in_confidence_range: step out of range");
  }
  const double d = s_opp - pred.points[static_cast<std::size_t>(t - 1)];
  return d * d / pred.variances[static_cast<std::size_t>(t - 1)] <= rho;
}

double confidence_weight(double s_opp, int t, const PredictionSet& preds) {
  double w = 0.0;
  for (const PredictedTrajectory& tr : preds.trajectories) {
    if (in_confidence_range(tr, t, s_opp, preds.rho)) w += tr.probability;
  }
  return w;
}

PredictionSet synthetic_predict(std::span<const double> ground_truth,
                                double sigma, int count,
                                std::span<const double> probabilities,
                                std::uint64_t seed, double rho) {
  if (sigma < 0.0) throw std::invalid_argument("synthetic_predict: sigma < 0");
  if (count < 1) throw std::invalid_argument("synthetic_predict: count < 1");
  if (!probabilities.empty() &&
      probabilities.size() != static_cast<std::size_t>(count)) {
    throw std::invalid_argument("synthetic_predict: probability count mismatch");
  }
  // Degenerate noise still needs a positive variance for the range test.
  const double variance = std::max(sigma * sigma, 1e-12);
  Rng rng(Rng::derive(seed, Rng::stream_id("synthetic-predict", 0)));
  PredictionSet out;
  out.rho = rho;
  out.trajectories.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    PredictedTrajectory& tr = out.trajectories[static_cast<std::size_t>(i)];
    tr.points.reserve(ground_truth.size());
    for (double y : ground_truth) {
      tr.points.push_back(y + sigma * rng.gaussian());
    }
    tr.variances.assign(ground_truth.size(), variance);
    tr.probability = probabilities.empty()
                         ? 1.0 / count
                         : probabilities[static_cast<std::size_t>(i)];
  }
  out.normalize_probabilities();
  return out;
}

PredictionSet predictions_from_json(const std::string& text, int horizon) {
  const json j = parse_json(text, "predictions");
  PredictionSet out;
  out.rho = get_num(j, "rho", "predictions");
  const json& trajs = get_field(j, "trajectories", "predictions");
  if (!trajs.is_array()) {
    throw ParseError("predictions.trajectories: expected an array");
  }
  for (const json& t : trajs) {
    PredictedTrajectory tr;
    tr.probability = get_num(t, "probability", "predictions.trajectories[]");
    tr.points = get_field(t, "points", "predictions.trajectories[]")
                    .get<std::vector<double>>();
    if (t.contains("variances")) {
      tr.variances = t["variances"].get<std::vector<double>>();
    }
    out.trajectories.push_back(std::move(tr));
  }
  out.validate(horizon);
  out.normalize_probabilities();
  return out;
}

std::string predictions_to_json(const PredictionSet& preds) {
  ordered_json j;
  j["version"] = 1;
  j["rho"] = preds.rho;
  j["trajectories"] = ordered_json::array();
  for (const PredictedTrajectory& tr : preds.trajectories) {
    j["trajectories"].push_back(ordered_json{{"probability", tr.probability},
                                             {"points", tr.points},
                                             {"variances", tr.variances}});
  }
  return j.dump(2) + "\n";
}

PredictionSet load_predictions(const std::string& path, int horizon) {
  return predictions_from_json(read_file(path), horizon);
}

void save_predictions(const PredictionSet& preds, const std::string& path) {
  write_file(path, predictions_to_json(preds));
}

}  // namespace gtplan
