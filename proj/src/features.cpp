#include "epf/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "epf/errors.hpp"
#include "epf/kernels.hpp"

namespace epf {

int FeatureSpec::max_lag() const {
  int m = n_recent_lags;
  for (const int l : use_lags) m = std::max(m, l);
  return m;
}

void FeatureSpec::validate() const {
  for (const int l : use_lags) {
    if (l != 24 && l != 48 && l != 168) {
      throw ConfigError("seasonal lag must be one of {24, 48, 168}, got " + std::to_string(l));
    }
  }
  if (n_recent_lags < 0) throw ConfigError("n_recent_lags must be >= 0");
}

void Standardization::apply_row(Eigen::Ref<Eigen::VectorXd> row) const {
  for (long j = 0; j < row.size(); ++j) {
    if (affected[j]) row[j] = (row[j] - center[j]) / scale[j];
  }
}

void Standardization::invert_row(Eigen::Ref<Eigen::VectorXd> row) const {
  for (long j = 0; j < row.size(); ++j) {
    if (affected[j]) row[j] = row[j] * scale[j] + center[j];
  }
}

long FeatureMatrix::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    if (column_names[j] == name) return static_cast<long>(j);
  }
  return -1;
}

namespace {

struct ColumnPlan {
  std::vector<std::string> names;
  std::vector<std::uint8_t> is_dummy;
  std::vector<int> seasonal;              // enabled seasonal lags, ascending
  int hour_dummy_count = 0;               // 0, 23 or 24
  std::vector<const PredictorColumn*> predictors;
};

ColumnPlan plan_columns(const HourlyPanel& panel, const FeatureSpec& spec) {
  spec.validate();
  ColumnPlan plan;
  plan.seasonal = spec.use_lags;
  std::sort(plan.seasonal.begin(), plan.seasonal.end());
  for (const int l : plan.seasonal) {
    plan.names.push_back("lag" + std::to_string(l));
    plan.is_dummy.push_back(0);
  }
  for (int i = 1; i <= spec.n_recent_lags; ++i) {
    plan.names.push_back("ar" + std::to_string(i));
    plan.is_dummy.push_back(0);
  }
  if (spec.weekend_dummies) {
    plan.names.push_back("sat");
    plan.names.push_back("sun");
    plan.is_dummy.push_back(1);
    plan.is_dummy.push_back(1);
  }
  if (spec.hour_dummies) {
    plan.hour_dummy_count = spec.all_hour_dummies ? 24 : 23;
    for (int h = 1; h <= plan.hour_dummy_count; ++h) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "h%02d", h);
      plan.names.push_back(buf);
      plan.is_dummy.push_back(1);
    }
  }
  for (const auto& name : spec.predictors) {
    plan.predictors.push_back(&panel.predictor(name));  // SchemaError if unknown
    plan.names.push_back(name);
    plan.is_dummy.push_back(0);
  }
  return plan;
}

void fill_row(const HourlyPanel& panel, const FeatureSpec& spec, const ColumnPlan& plan, long t,
              Eigen::VectorXd& row) {
  long j = 0;
  for (const int l : plan.seasonal) row[j++] = panel.price[t - l];
  for (int i = 1; i <= spec.n_recent_lags; ++i) row[j++] = panel.price[t - i];
  if (spec.weekend_dummies) {
    row[j++] = panel.calendar.is_saturday(t) ? 1.0 : 0.0;
    row[j++] = panel.calendar.is_sunday(t) ? 1.0 : 0.0;
  }
  if (spec.hour_dummies) {
    const int h = panel.calendar.hour_of_day(t);
    for (int k = 1; k <= plan.hour_dummy_count; ++k) row[j++] = (h == k) ? 1.0 : 0.0;
  }
  for (const auto* col : plan.predictors) row[j++] = col->values[t];
}

}  // namespace

FeatureMatrix build_features(const HourlyPanel& panel, const FeatureSpec& spec, long t_begin,
                             long t_end) {
  const ColumnPlan plan = plan_columns(panel, spec);
  const int warmup = spec.max_lag();
  if (panel.length() <= warmup + 1) {
    throw HistoryError("panel length " + std::to_string(panel.length()) +
                       " too short for max lag " + std::to_string(warmup));
  }
  if (t_begin < warmup) {
    throw HistoryError("row start " + std::to_string(t_begin) + " precedes warm-up of " +
                       std::to_string(warmup) + " hours");
  }
  if (t_end > panel.length() || t_begin >= t_end) {
    throw RangeError("feature rows [" + std::to_string(t_begin) + ", " + std::to_string(t_end) +
                     ") out of range");
  }

  FeatureMatrix m;
  const long rows = t_end - t_begin;
  m.x.resize(rows, static_cast<long>(plan.names.size()));
  m.y.resize(rows);
  m.row_times.resize(rows);
  m.column_names = plan.names;
  m.is_dummy = plan.is_dummy;
  Eigen::VectorXd row(static_cast<long>(plan.names.size()));
  for (long r = 0; r < rows; ++r) {
    const long t = t_begin + r;
    fill_row(panel, spec, plan, t, row);
    m.x.row(r) = row;
    m.y[r] = panel.price[t];
    m.row_times[r] = t;
  }
  return m;
}

FeatureMatrix build_features(const HourlyPanel& panel, const FeatureSpec& spec) {
  return build_features(panel, spec, spec.max_lag(), panel.length());
}

Eigen::VectorXd build_feature_row(const HourlyPanel& panel, const FeatureSpec& spec, long t) {
  const ColumnPlan plan = plan_columns(panel, spec);
  if (t < spec.max_lag() || t >= panel.length()) {
    throw RangeError("feature row for hour " + std::to_string(t) + " out of range");
  }
  Eigen::VectorXd row(static_cast<long>(plan.names.size()));
  fill_row(panel, spec, plan, t, row);
  return row;
}

FeatureMatrix standardize_fit_transform(FeatureMatrix m, bool exclude_dummies) {
  if (m.standardized) throw ConfigError("feature matrix is already standardized");
  const long n = m.rows(), p = m.cols();
  if (n < 2) throw EmptyError("standardization requires at least 2 rows");
  m.stats.center = Eigen::VectorXd::Zero(p);
  m.stats.scale = Eigen::VectorXd::Ones(p);
  m.stats.affected.assign(p, 0);
  for (long j = 0; j < p; ++j) {
    if (exclude_dummies && m.is_dummy[j]) continue;
    double* col = m.x.col(j).data();
    const double mean = kernels::sum(col, n) / n;
    for (long i = 0; i < n; ++i) col[i] -= mean;
    const double var = kernels::sum_sq(col, n) / (n - 1);
    if (var <= 0.0) {
      throw VarianceError("zero-variance column '" + m.column_names[j] +
                          "' cannot be standardized");
    }
    const double sd = std::sqrt(var);
    for (long i = 0; i < n; ++i) col[i] /= sd;
    m.stats.center[j] = mean;
    m.stats.scale[j] = sd;
    m.stats.affected[j] = 1;
  }
  m.standardized = true;
  return m;
}

}  // namespace epf
