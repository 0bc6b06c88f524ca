#pragma once

#include <functional>
#include <string>
#include <vector>

namespace epf {

// One cross-validation fold: train on d consecutive hours, validate on the
// next 24. Successive folds shift by one day.
struct Fold {
  long train_begin = 0;
  long train_end = 0;  // == valid_begin
  long valid_begin = 0;
  long valid_end = 0;
};

// Splits the training hours [begin, end) into (|T| - d) / 24 folds of size d.
// Throws PlanError when the remainder is not a positive multiple of 24.
std::vector<Fold> make_folds(long begin, long end, long subset_hours);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct TuningResult {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> combinations;  // full Cartesian product, grid order
  std::vector<double> mean_scores;                // RMSE orientation: lower is better
  std::vector<std::vector<double>> per_fold_scores;
  long best_index = 0;
  int failed_fits = 0;  // fold evaluations scored +inf

  const std::vector<double>& best() const { return combinations[best_index]; }
};

// Evaluates one (combination, fold): fit on the fold's training hours and
// return the RMSE of the next-24-hour forecast. Exceptions are caught by the
// tuner and scored +inf.
using FoldEvaluator =
    std::function<double(const std::vector<double>& combination, const Fold& fold)>;

// Full Cartesian sweep; per-combination score is the mean over folds. Ties
// break toward the first-listed combination. Deterministic given the
// evaluator.
TuningResult tune(const std::vector<GridAxis>& axes, const std::vector<Fold>& folds,
                  const FoldEvaluator& evaluate);

}  // namespace epf
