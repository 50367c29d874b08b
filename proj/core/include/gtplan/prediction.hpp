#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gtplan {

/// One predicted opponent trajectory: positions and variances for steps
/// 1..N plus the probability of this mode being executed.
struct PredictedTrajectory {
  std::vector<double> points;     // predicted positions [m], steps 1..N
  std::vector<double> variances;  // per-step variance [m^2]
  double probability = 1.0;
};

/// A set of predicted opponent trajectories with the Mahalanobis threshold
/// that sizes their confidence ranges.
struct PredictionSet {
  std::vector<PredictedTrajectory> trajectories;
  double rho = 4.0;

  void validate(int horizon) const;
  /// Scales probabilities to sum to one.
  void normalize_probabilities();
};

/// True when (s_opp - y_t)^2 / var_t <= rho. Step t is 1-based; throws
/// std::invalid_argument when t is out of range.
bool in_confidence_range(const PredictedTrajectory& pred, int t, double s_opp,
                         double rho);

/// Sum of probabilities of all trajectories whose confidence range at step t
/// contains s_opp. With normalized probabilities the result lies in [0, 1].
double confidence_weight(double s_opp, int t, const PredictionSet& preds);

/// Builds `count` predictions by adding i.i.d. Gaussian noise of standard
/// deviation sigma to the ground-truth positions. Variances are sigma^2
/// (floored away from zero so ranges stay well defined). Empty
/// `probabilities` means uniform.
PredictionSet synthetic_predict(std::span<const double> ground_truth,
                                double sigma, int count,
                                std::span<const double> probabilities,
                                std::uint64_t seed, double rho = 4.0);

PredictionSet predictions_from_json(const std::string& text, int horizon);
std::string predictions_to_json(const PredictionSet& preds);
PredictionSet load_predictions(const std::string& path, int horizon);
void save_predictions(const PredictionSet& preds, const std::string& path);

}  // namespace gtplan
