#include "epf/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "epf/csv.hpp"
#include "epf/errors.hpp"
#include "epf/kernels.hpp"
#include "epf/linear_models.hpp"
#include "epf/pcr.hpp"
#include "epf/tuner.hpp"

namespace epf {

const char* kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Naive: return "naive";
    case ModelKind::Dlr: return "dlr";
    case ModelKind::SeasonalArma: return "seasonal_arma";
    case ModelKind::SeasonalArmax: return "seasonal_armax";
    case ModelKind::Ridge: return "ridge";
    case ModelKind::Lasso: return "lasso";
    case ModelKind::Svr: return "svr";
    case ModelKind::Pcr: return "pcr";
    case ModelKind::RandomForest: return "rf";
    case ModelKind::Blm: return "blm";
    case ModelKind::Ensemble: return "ensemble";
  }
  return "unknown";
}

ModelKind kind_from_name(const std::string& name) {
  static const std::pair<const char*, ModelKind> table[] = {
      {"naive", ModelKind::Naive},
      {"dlr", ModelKind::Dlr},
      {"seasonal_arma", ModelKind::SeasonalArma},
      {"seasonal_armax", ModelKind::SeasonalArmax},
      {"ridge", ModelKind::Ridge},
      {"lasso", ModelKind::Lasso},
      {"svr", ModelKind::Svr},
      {"pcr", ModelKind::Pcr},
      {"rf", ModelKind::RandomForest},
      {"blm", ModelKind::Blm},
      {"ensemble", ModelKind::Ensemble},
  };
  for (const auto& [n, k] : table) {
    if (name == n) return k;
  }
  throw ConfigError("unknown model kind: '" + name + "'");
}

void ForecasterSpec::validate() const {
  features.validate();
  const bool is_arma = kind == ModelKind::SeasonalArma || kind == ModelKind::SeasonalArmax;
  if (!is_arma && features.n_recent_lags != 0) {
    throw ConfigError("recent-hour lags are reserved to the ARMA family; '" + label() +
                      "' would need unavailable day-ahead prices");
  }
  if (kind == ModelKind::Naive &&
      std::find(features.use_lags.begin(), features.use_lags.end(), 168) ==
          features.use_lags.end()) {
    throw ConfigError("the naive benchmark requires lag 168 in the feature spec");
  }
  if (penalty.exponent != 1 && penalty.exponent != 2) {
    throw ConfigError("penalty exponent must be 1 (LASSO) or 2 (ridge)");
  }
  if (is_arma) arma.validate();
  if (kind == ModelKind::Ensemble) {
    if (ensemble_members.size() < 2) {
      throw ConfigError("ensemble needs at least 2 members");
    }
    for (const auto& m : ensemble_members) {
      if (m.kind == ModelKind::Ensemble) throw ConfigError("ensembles cannot nest");
      m.validate();
    }
  }
}

ForecasterSpec make_default_spec(ModelKind kind, std::vector<std::string> externals) {
  ForecasterSpec spec;
  spec.kind = kind;
  spec.name = kind_name(kind);
  spec.features.use_lags = {24, 48, 168};
  spec.features.n_recent_lags = 0;
  spec.features.weekend_dummies = kind != ModelKind::Naive;
  spec.features.hour_dummies = kind != ModelKind::Naive;
  spec.features.predictors = std::move(externals);
  switch (kind) {
    case ModelKind::Svr:
    case ModelKind::Ridge:
    case ModelKind::Lasso:
    case ModelKind::Pcr:
    case ModelKind::Blm:
      spec.features.standardize = true;
      break;
    default:
      spec.features.standardize = false;
      break;
  }
  if (kind == ModelKind::SeasonalArma || kind == ModelKind::SeasonalArmax) {
    spec.arma = ArmaOrder{};  // (1,1) fixed unless select_by_aicc is enabled
  }
  if (kind == ModelKind::Ridge || kind == ModelKind::Lasso) {
    spec.penalty.exponent = kind == ModelKind::Lasso ? 1 : 2;
  }
  return spec;
}

const std::vector<std::string>& Forecaster::flags() const {
  static const std::vector<std::string> none;
  return none;
}

namespace {

void require_forecastable(const HourlyPanel& panel, long day_start, int warmup) {
  if (day_start < warmup) {
    throw HistoryError("forecast day at hour " + std::to_string(day_start) +
                       " lacks the " + std::to_string(warmup) + "-hour warm-up");
  }
  if (day_start + kHoursPerDay > panel.length()) {
    throw MissingExogError("panel ends before the target day: predictor values for hours " +
                           std::to_string(day_start) + ".." +
                           std::to_string(day_start + 23) + " unavailable");
  }
}

class NaiveForecaster final : public Forecaster {
 public:
  std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const override {
    require_forecastable(panel, day_start, kHoursPerWeek);
    std::array<double, 24> out;
    for (int h = 0; h < 24; ++h) out[h] = panel.price[day_start + h - kHoursPerWeek];
    return out;
  }
  ModelKind kind() const override { return ModelKind::Naive; }
  void serialize(std::ostream& os) const override {
    os << "epf-model v1\nkind: naive\nlag: 168\n";
  }
};

// Shared by every model whose forecast is an affine function of the feature
// row: DLR, ridge, LASSO, PCR and BLM.
class LinearForecaster final : public Forecaster {
 public:
  LinearForecaster(ModelKind kind, FeatureSpec fspec, Standardization stats,
                   Eigen::VectorXd weights, double intercept,
                   std::vector<std::string> column_names, std::string hyper_line,
                   std::vector<std::string> flags)
      : kind_(kind),
        fspec_(std::move(fspec)),
        stats_(std::move(stats)),
        weights_(std::move(weights)),
        intercept_(intercept),
        column_names_(std::move(column_names)),
        hyper_line_(std::move(hyper_line)),
        flags_(std::move(flags)) {}

  std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const override {
    require_forecastable(panel, day_start, fspec_.max_lag());
    std::array<double, 24> out;
    for (int h = 0; h < 24; ++h) {
      Eigen::VectorXd row = build_feature_row(panel, fspec_, day_start + h);
      if (!stats_.empty()) stats_.apply_row(row);
      out[h] = intercept_ + kernels::dot(weights_.data(), row.data(), row.size());
    }
    return out;
  }

  ModelKind kind() const override { return kind_; }

  void serialize(std::ostream& os) const override {
    os << "epf-model v1\nkind: " << kind_name(kind_) << '\n';
    if (!hyper_line_.empty()) os << hyper_line_ << '\n';
    os << "intercept " << format_double(intercept_) << '\n';
    for (long j = 0; j < weights_.size(); ++j) {
      os << "coef " << column_names_[j] << ' ' << format_double(weights_[j]) << '\n';
    }
  }

  const std::vector<std::string>& flags() const override { return flags_; }

  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  ModelKind kind_;
  FeatureSpec fspec_;
  Standardization stats_;
  Eigen::VectorXd weights_;
  double intercept_;
  std::vector<std::string> column_names_;
  std::string hyper_line_;
  std::vector<std::string> flags_;
};

class SvrForecaster final : public Forecaster {
 public:
  SvrForecaster(FeatureSpec fspec, Standardization stats, SvrFit fit, double c, double epsilon)
      : fspec_(std::move(fspec)), stats_(std::move(stats)), fit_(std::move(fit)), c_(c),
        epsilon_(epsilon) {}

  std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const override {
    require_forecastable(panel, day_start, fspec_.max_lag());
    std::array<double, 24> out;
    for (int h = 0; h < 24; ++h) {
      Eigen::VectorXd row = build_feature_row(panel, fspec_, day_start + h);
      stats_.apply_row(row);
      out[h] = svr_predict(fit_, row);
    }
    return out;
  }

  ModelKind kind() const override { return ModelKind::Svr; }

  void serialize(std::ostream& os) const override {
    os << "epf-model v1\nkind: svr\nC " << format_double(c_) << "\nepsilon "
       << format_double(epsilon_) << "\nsigma " << format_double(fit_.sigma)
       << "  (median pairwise distance heuristic)\nbias " << format_double(fit_.bias)
       << "\nsupport_vectors " << fit_.alpha.size() << '\n';
    for (long s = 0; s < fit_.alpha.size(); ++s) {
      os << "alpha " << s << ' ' << format_double(fit_.alpha[s]) << '\n';
    }
  }

 private:
  FeatureSpec fspec_;
  Standardization stats_;
  SvrFit fit_;
  double c_, epsilon_;
};

class ForestForecaster final : public Forecaster {
 public:
  ForestForecaster(FeatureSpec fspec, ForestFit fit, RfConfig cfg)
      : fspec_(std::move(fspec)), fit_(std::move(fit)), cfg_(cfg) {}

  std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const override {
    require_forecastable(panel, day_start, fspec_.max_lag());
    std::array<double, 24> out;
    for (int h = 0; h < 24; ++h) {
      out[h] = fit_.predict(build_feature_row(panel, fspec_, day_start + h));
    }
    return out;
  }

  ModelKind kind() const override { return ModelKind::RandomForest; }

  void serialize(std::ostream& os) const override {
    os << "epf-model v1\nkind: rf\nn_trees " << fit_.trees.size() << "\nmin_node_size "
       << cfg_.min_node_size << "\nm_try " << cfg_.m_try << "\ntraining_range ["
       << format_double(fit_.y_min) << ", " << format_double(fit_.y_max) << "]\n";
  }

  const ForestFit& forest() const { return fit_; }

 private:
  FeatureSpec fspec_;
  ForestFit fit_;
  RfConfig cfg_;
};

class ArmaForecaster final : public Forecaster {
 public:
  ArmaForecaster(ModelKind kind, FeatureSpec base, ArmaFit fit, long window_len,
                 std::vector<std::string> flags)
      : kind_(kind),
        base_(std::move(base)),
        fit_(std::move(fit)),
        window_len_(window_len),
        flags_(std::move(flags)) {
    row_spec_ = base_;
    row_spec_.n_recent_lags = fit_.p;
    n_seasonal_ = static_cast<int>(row_spec_.use_lags.size());
  }

  std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const override {
    require_forecastable(panel, day_start, row_spec_.max_lag());
    if (day_start - window_len_ < row_spec_.max_lag()) {
      throw HistoryError("ARMA forecast needs " + std::to_string(window_len_) +
                         " residual-window hours plus warm-up before the target day");
    }
    // Conditional residuals over the trailing window supply the MA tail.
    const Eigen::VectorXd resid =
        arma_residuals(panel, base_, fit_, day_start - window_len_, day_start);

    std::array<double, 24> out;
    for (int h = 0; h < 24; ++h) {
      const long t = day_start + h;
      Eigen::VectorXd row = build_feature_row(panel, row_spec_, t);
      // Recent lags that fall on the forecast day use the recursion's own
      // forecasts instead of (unavailable) realized prices.
      for (int i = 1; i <= fit_.p; ++i) {
        if (t - i >= day_start) row[n_seasonal_ + i - 1] = out[h - i];
      }
      double value = fit_.mean_params[0] +
                     kernels::dot(fit_.mean_params.data() + 1, row.data(), row.size());
      // MA error terms beyond the sample are zero.
      for (int j = 1; j <= fit_.q; ++j) {
        const long tj = t - j;
        if (tj < day_start) value += fit_.theta[j - 1] * resid[tj - (day_start - window_len_)];
      }
      out[h] = value;
    }
    return out;
  }

  ModelKind kind() const override { return kind_; }

  void serialize(std::ostream& os) const override {
    os << "epf-model v1\nkind: " << kind_name(kind_) << "\norder (" << fit_.p << ", " << fit_.q
       << ")\nexog: raw values\ncss " << format_double(fit_.css) << "\naicc "
       << format_double(fit_.aicc) << '\n';
    for (long j = 0; j < fit_.mean_params.size(); ++j) {
      os << "coef " << fit_.mean_names[j] << ' ' << format_double(fit_.mean_params[j]) << '\n';
    }
    for (long j = 0; j < fit_.theta.size(); ++j) {
      os << "coef ma" << (j + 1) << ' ' << format_double(fit_.theta[j]) << '\n';
    }
  }

  const std::vector<std::string>& flags() const override { return flags_; }

  const ArmaFit& fit() const { return fit_; }

 private:
  ModelKind kind_;
  FeatureSpec base_;
  FeatureSpec row_spec_;
  ArmaFit fit_;
  long window_len_;
  int n_seasonal_ = 0;
  std::vector<std::string> flags_;
};

class EnsembleForecaster final : public Forecaster {
 public:
  EnsembleForecaster(std::vector<std::unique_ptr<Forecaster>> members,
                     std::vector<std::string> member_names, Eigen::VectorXd weights,
                     double intercept, std::vector<std::string> flags)
      : members_(std::move(members)),
        member_names_(std::move(member_names)),
        weights_(std::move(weights)),
        intercept_(intercept),
        flags_(std::move(flags)) {}

  std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const override {
    std::array<double, 24> out;
    out.fill(intercept_);
    for (std::size_t m = 0; m < members_.size(); ++m) {
      const auto member = members_[m]->forecast_day(panel, day_start);
      for (int h = 0; h < 24; ++h) out[h] += weights_[static_cast<long>(m)] * member[h];
    }
    return out;
  }

  ModelKind kind() const override { return ModelKind::Ensemble; }

  void serialize(std::ostream& os) const override {
    os << "epf-model v1\nkind: ensemble\nintercept " << format_double(intercept_) << '\n';
    for (std::size_t m = 0; m < members_.size(); ++m) {
      os << "coef " << member_names_[m] << ' ' << format_double(weights_[static_cast<long>(m)])
         << '\n';
    }
  }

  const std::vector<std::string>& flags() const override { return flags_; }

 private:
  std::vector<std::unique_ptr<Forecaster>> members_;
  std::vector<std::string> member_names_;
  Eigen::VectorXd weights_;
  double intercept_;
  std::vector<std::string> flags_;
};

std::string penalty_line(const PenaltyConfig& p) {
  return std::string("lambda ") + format_double(p.lambda) + " exponent " +
         std::to_string(p.exponent);
}

std::unique_ptr<Forecaster> fit_ensemble(const HourlyPanel& panel, const ForecasterSpec& spec,
                                         TrainWindow window, Rng& rng);

}  // namespace

std::unique_ptr<Forecaster> fit_forecaster(const HourlyPanel& panel, const ForecasterSpec& spec,
                                           TrainWindow window, Rng rng) {
  spec.validate();
  if (window.begin < 0 || window.end > panel.length() || window.begin >= window.end) {
    throw RangeError("training window [" + std::to_string(window.begin) + ", " +
                     std::to_string(window.end) + ") out of range");
  }

  switch (spec.kind) {
    case ModelKind::Naive: {
      if (window.end < kHoursPerWeek) {
        throw HistoryError("naive benchmark needs 168 hours of history, got " +
                           std::to_string(window.end));
      }
      return std::make_unique<NaiveForecaster>();
    }

    case ModelKind::SeasonalArma:
    case ModelKind::SeasonalArmax: {
      ArmaFit fit = fit_seasonal_arma(panel, spec.features, spec.arma, window.begin, window.end);
      std::vector<std::string> flags;
      if (fit.ma_reflected) flags.push_back("ma coefficients reflected into invertible region");
      return std::make_unique<ArmaForecaster>(spec.kind, spec.features, std::move(fit),
                                              window.end - window.begin, std::move(flags));
    }

    default:
      break;
  }

  if (spec.kind == ModelKind::Ensemble) return fit_ensemble(panel, spec, window, rng);

  FeatureMatrix m = build_features(panel, spec.features, window.begin, window.end);
  if (spec.features.standardize) m = standardize_fit_transform(std::move(m));

  switch (spec.kind) {
    case ModelKind::Dlr: {
      const LinearFit fit = fit_ols(m.x, m.y, true);
      return std::make_unique<LinearForecaster>(spec.kind, spec.features, m.stats, fit.weights,
                                                fit.intercept, m.column_names, "",
                                                std::vector<std::string>{});
    }
    case ModelKind::Ridge: {
      const LinearFit fit = fit_ridge(m.x, m.y, spec.penalty.lambda, true);
      return std::make_unique<LinearForecaster>(spec.kind, spec.features, m.stats, fit.weights,
                                                fit.intercept, m.column_names,
                                                penalty_line(spec.penalty),
                                                std::vector<std::string>{});
    }
    case ModelKind::Lasso: {
      const LinearFit fit = fit_lasso(m.x, m.y, spec.penalty.lambda, true);
      return std::make_unique<LinearForecaster>(spec.kind, spec.features, m.stats, fit.weights,
                                                fit.intercept, m.column_names,
                                                penalty_line(spec.penalty),
                                                std::vector<std::string>{});
    }
    case ModelKind::Pcr: {
      const int k = spec.pcr.k > 0 ? spec.pcr.k : static_cast<int>(m.cols());
      const PcrFit fit = fit_pcr(m.x, m.y, k);
      return std::make_unique<LinearForecaster>(spec.kind, spec.features, m.stats, fit.weights,
                                                fit.intercept, m.column_names,
                                                "components " + std::to_string(k),
                                                std::vector<std::string>{});
    }
    case ModelKind::Blm: {
      const BlmFit fit = fit_blm(m.x, m.y, spec.blm);
      std::vector<std::string> flags;
      for (const int j : fit.skipped_columns) {
        flags.push_back("zero-variance candidate skipped: " + m.column_names[j]);
      }
      return std::make_unique<LinearForecaster>(
          spec.kind, spec.features, m.stats, fit.weights, fit.intercept, m.column_names,
          "m_stop " + std::to_string(spec.blm.m_stop) + " nu " + format_double(spec.blm.nu),
          std::move(flags));
    }
    case ModelKind::Svr: {
      SvrFit fit = fit_svr(m.x, m.y, spec.svr, rng.derive("svr"));
      return std::make_unique<SvrForecaster>(spec.features, m.stats, std::move(fit), spec.svr.c,
                                             spec.svr.epsilon);
    }
    case ModelKind::RandomForest: {
      ForestFit fit = fit_forest(m.x, m.y, spec.rf, rng.derive("rf"));
      RfConfig used = spec.rf;
      if (used.m_try == 0) {
        used.m_try = std::max(1, static_cast<int>(std::floor(std::sqrt(double(m.cols())))));
      }
      return std::make_unique<ForestForecaster>(spec.features, std::move(fit), used);
    }
    default:
      throw ConfigError("unhandled model kind");
  }
}

namespace {

std::unique_ptr<Forecaster> fit_ensemble(const HourlyPanel& panel, const ForecasterSpec& spec,
                                         TrainWindow window, Rng& rng) {
  const auto folds = make_folds(window.begin, window.end, spec.ensemble_subset_hours);
  const std::size_t n_members = spec.ensemble_members.size();

  std::vector<std::string> flags;
  std::vector<Eigen::VectorXd> rows;  // member predictions per held-out hour
  std::vector<double> realized;
  for (std::size_t j = 0; j < folds.size(); ++j) {
    const Fold& fold = folds[j];
    std::vector<std::array<double, 24>> preds(n_members);
    bool fold_ok = true;
    for (std::size_t mi = 0; mi < n_members; ++mi) {
      const auto& member = spec.ensemble_members[mi];
      try {
        Rng member_rng = rng.derive("ensemble-fold").derive(j).derive(member.label());
        const auto fitted =
            fit_forecaster(panel, member, {fold.train_begin, fold.train_end}, member_rng);
        preds[mi] = fitted->forecast_day(panel, fold.valid_begin);
      } catch (const std::exception& e) {
        flags.push_back("fold " + std::to_string(j) + " dropped: " + member.label() + ": " +
                        e.what());
        fold_ok = false;
        break;
      }
    }
    if (!fold_ok) continue;
    for (int h = 0; h < 24; ++h) {
      Eigen::VectorXd row(static_cast<long>(n_members));
      for (std::size_t mi = 0; mi < n_members; ++mi) row[static_cast<long>(mi)] = preds[mi][h];
      rows.push_back(std::move(row));
      realized.push_back(panel.price[fold.valid_begin + h]);
    }
  }
  if (rows.empty()) {
    throw ConvergenceError("every stacking fold failed", {});
  }

  Eigen::MatrixXd p(static_cast<long>(rows.size()), static_cast<long>(n_members));
  Eigen::VectorXd r(static_cast<long>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.row(static_cast<long>(i)) = rows[i];
    r[static_cast<long>(i)] = realized[i];
  }

  const auto stack = fit_ensemble_weights(p, r);
  if (stack.ridge_fallback) {
    flags.push_back("collinear member predictions; ridge fallback (lambda = 1e-6)");
  }

  // Refit members on the full window for the production forecast.
  std::vector<std::unique_ptr<Forecaster>> members;
  std::vector<std::string> member_names;
  for (const auto& member : spec.ensemble_members) {
    Rng member_rng = rng.derive("ensemble-full").derive(member.label());
    members.push_back(fit_forecaster(panel, member, window, member_rng));
    member_names.push_back(member.label());
  }
  return std::make_unique<EnsembleForecaster>(std::move(members), std::move(member_names),
                                              stack.weights, stack.intercept, std::move(flags));
}

}  // namespace

EnsembleWeights fit_ensemble_weights(const Eigen::MatrixXd& member_predictions,
                                     const Eigen::VectorXd& realized) {
  if (member_predictions.cols() < 2) throw ConfigError("ensemble needs at least 2 members");
  if (member_predictions.rows() != realized.size()) {
    throw RangeError("member predictions and realized lengths differ");
  }
  EnsembleWeights out;
  try {
    const LinearFit fit = fit_ols(member_predictions, realized, true);
    out.weights = fit.weights;
    out.intercept = fit.intercept;
  } catch (const SingularError&) {
    const LinearFit fit = fit_ridge(member_predictions, realized, 1e-6, true);
    out.weights = fit.weights;
    out.intercept = fit.intercept;
    out.ridge_fallback = true;
  }
  return out;
}

}  // namespace epf
