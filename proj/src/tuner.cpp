#include "epf/tuner.hpp"

#include <cmath>
#include <limits>

#include "epf/errors.hpp"
#include "epf/time.hpp"

namespace epf {

std::vector<Fold> make_folds(long begin, long end, long subset_hours) {
  const long total = end - begin;
  if (subset_hours < 1) throw PlanError("subset size must be positive");
  if (total < subset_hours + kHoursPerDay) {
    throw PlanError("training span of " + std::to_string(total) +
                    " hours leaves no 24-hour validation block after a subset of " +
                    std::to_string(subset_hours));
  }
  const long spare = total - subset_hours;
  if (spare % kHoursPerDay != 0) {
    throw PlanError("training span minus subset size (" + std::to_string(spare) +
                    " hours) is not divisible by 24");
  }
  const long count = spare / kHoursPerDay;
  std::vector<Fold> folds(count);
  for (long j = 0; j < count; ++j) {
    Fold& f = folds[j];
    f.train_begin = begin + j * kHoursPerDay;
    f.train_end = f.train_begin + subset_hours;
    f.valid_begin = f.train_end;
    f.valid_end = f.valid_begin + kHoursPerDay;
  }
  return folds;
}

TuningResult tune(const std::vector<GridAxis>& axes, const std::vector<Fold>& folds,
                  const FoldEvaluator& evaluate) {
  if (axes.empty()) throw PlanError("no tuning axes");
  if (folds.empty()) throw PlanError("no folds");
  for (const auto& a : axes) {
    if (a.values.empty()) throw PlanError("empty grid for axis '" + a.name + "'");
  }

  TuningResult result;
  for (const auto& a : axes) result.axis_names.push_back(a.name);

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  result.combinations.reserve(total);

  std::vector<std::size_t> cursor(axes.size(), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> combo(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) combo[a] = axes[a].values[cursor[a]];
    result.combinations.push_back(std::move(combo));
    // Odometer increment, last axis fastest.
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++cursor[a] < axes[a].values.size()) break;
      cursor[a] = 0;
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  result.per_fold_scores.assign(total, std::vector<double>(folds.size(), inf));
  result.mean_scores.assign(total, inf);
  for (std::size_t c = 0; c < total; ++c) {
    double sum = 0.0;
    for (std::size_t j = 0; j < folds.size(); ++j) {
      double score;
      try {
        score = evaluate(result.combinations[c], folds[j]);
        if (!std::isfinite(score)) throw DegenerateError("non-finite fold score");
      } catch (const std::exception&) {
        score = inf;
        ++result.failed_fits;
      }
      result.per_fold_scores[c][j] = score;
      sum += score;
    }
    result.mean_scores[c] = sum / static_cast<double>(folds.size());
    if (result.mean_scores[c] < result.mean_scores[result.best_index]) {
      result.best_index = static_cast<long>(c);
    }
  }
  return result;
}

}  // namespace epf
