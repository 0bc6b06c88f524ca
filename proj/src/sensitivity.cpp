#include "epf/sensitivity.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "epf/csv.hpp"
#include "epf/errors.hpp"

namespace epf {

FeatureSpec remove_group(const FeatureSpec& features, const SensitivityGroup& group) {
  FeatureSpec out = features;
  for (const auto& member : group.members) {
    if (member == "@hour_dummies") {
      out.hour_dummies = false;
    } else if (member == "@weekend_dummies") {
      out.weekend_dummies = false;
    } else if (member == "@lag24" || member == "@lag48" || member == "@lag168") {
      const int lag = std::stoi(member.substr(4));
      std::erase(out.use_lags, lag);
    } else {
      std::erase(out.predictors, member);
    }
  }
  return out;
}

namespace {

void validate_groups(const HourlyPanel& panel, const std::vector<SensitivityGroup>& groups) {
  if (groups.empty()) throw SchemaError("no sensitivity groups");
  static const std::set<std::string> tokens{"@hour_dummies", "@weekend_dummies", "@lag24",
                                            "@lag48", "@lag168"};
  std::set<std::string> seen_names, seen_members;
  for (const auto& g : groups) {
    if (g.members.empty()) throw SchemaError("group '" + g.name + "' has no members");
    if (!seen_names.insert(g.name).second) {
      throw SchemaError("duplicate group name '" + g.name + "'");
    }
    for (const auto& m : g.members) {
      if (!tokens.count(m) && !panel.find_predictor(m)) {
        throw SchemaError("group '" + g.name + "' names unknown predictor '" + m + "'");
      }
      if (!seen_members.insert(m).second) {
        throw SchemaError("member '" + m + "' appears in more than one group");
      }
    }
  }
}

}  // namespace

SensitivityReport run_sensitivity(const HourlyPanel& panel, const BacktestPlan& plan,
                                  const std::vector<SensitivityGroup>& groups) {
  validate_groups(panel, groups);

  // The naive benchmark has no removable predictors: it is excluded from the
  // fusion roster entirely.
  BacktestPlan base_plan = plan;
  base_plan.models.clear();
  for (const auto& spec : plan.models) {
    if (spec.kind != ModelKind::Naive) base_plan.models.push_back(spec);
  }
  if (base_plan.models.empty()) throw PlanError("sensitivity needs at least one non-naive model");

  const BacktestResult baseline = run_backtest(panel, base_plan);

  SensitivityReport report;
  const long n_models = static_cast<long>(base_plan.models.size());
  const long n_groups = static_cast<long>(groups.size());
  for (const auto& run : baseline.models) {
    report.models.push_back(run.label);
    report.baseline_rmse.push_back(run.metrics.rmse);
    report.baseline_r2.push_back(run.r_squared);
  }
  for (const auto& g : groups) report.groups.push_back(g.name);

  // Normalized clipped R^2 weights.
  report.weights.resize(n_models);
  double weight_sum = 0.0;
  for (long m = 0; m < n_models; ++m) {
    report.weights[m] = std::max(baseline.models[m].r_squared, 0.0);
    weight_sum += report.weights[m];
  }
  if (weight_sum <= 0.0) {
    throw WeightError("every model has out-of-sample R^2 <= 0; fusion weights are undefined");
  }
  report.weights /= weight_sum;

  report.s.resize(n_models, n_groups);
  for (long g = 0; g < n_groups; ++g) {
    BacktestPlan leave_out = base_plan;
    for (auto& spec : leave_out.models) {
      spec.features = remove_group(spec.features, groups[g]);
      for (auto& member : spec.ensemble_members) {
        member.features = remove_group(member.features, groups[g]);
      }
    }
    const BacktestResult rerun = run_backtest(panel, leave_out);
    for (long m = 0; m < n_models; ++m) {
      report.s(m, g) = rerun.models[m].metrics.rmse / baseline.models[m].metrics.rmse;
    }
  }

  report.fused = report.s.transpose() * report.weights;
  report.ranking.resize(n_groups);
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [&](int a, int b) { return report.fused[a] > report.fused[b]; });
  const double top = report.fused[report.ranking.front()];
  report.scaled = report.fused * (100.0 / top);
  return report;
}

void write_sensitivity_csv(const SensitivityReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "group";
  for (const auto& m : report.models) out << ",S_" << m;
  out << ",fused_S,scaled_pct\n";
  for (const int g : report.ranking) {
    out << report.groups[g];
    for (long m = 0; m < report.s.rows(); ++m) out << ',' << format_fixed(report.s(m, g), 4);
    out << ',' << format_fixed(report.fused[g], 4) << ',' << format_fixed(report.scaled[g], 4)
        << '\n';
  }
}

}  // namespace epf
