#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace epf {

// Base of every engine error. Subcommands map these to exit code 2 (config,
// schema) or 1 (runtime); see tools/epf_main.cpp.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define EPF_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& msg) : Error(msg) {}       \
  }

EPF_DEFINE_ERROR(ParseError);        // unparseable cell / timestamp / number
EPF_DEFINE_ERROR(GapError);          // missing hour in an hourly series
EPF_DEFINE_ERROR(DuplicateError);    // repeated timestamp
EPF_DEFINE_ERROR(RangeError);        // index range violation
EPF_DEFINE_ERROR(HistoryError);      // not enough trailing history for a fit
EPF_DEFINE_ERROR(SchemaError);       // unknown column / group name
EPF_DEFINE_ERROR(VarianceError);     // zero-variance column where scaling is required
EPF_DEFINE_ERROR(ConfigError);       // invalid configuration value
EPF_DEFINE_ERROR(SingularError);     // unpenalized system is singular
EPF_DEFINE_ERROR(DegenerateError);   // degenerate input (all-zero design, ...)
EPF_DEFINE_ERROR(RankError);         // requested components exceed rank
EPF_DEFINE_ERROR(PlanError);         // infeasible fold/backtest plan
EPF_DEFINE_ERROR(EmptyError);        // empty input where data is required
EPF_DEFINE_ERROR(MissingExogError);  // predictor value absent for the target day
EPF_DEFINE_ERROR(PairError);         // paired series mismatch
EPF_DEFINE_ERROR(WeightError);       // fusion weights undefined (all R^2 <= 0)

#undef EPF_DEFINE_ERROR

// Optimizer hit its iteration cap. Carries the best parameter vector seen so
// the caller can inspect it; the backtest treats this as a fit failure.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> best)
      : Error(msg), best_so_far(std::move(best)) {}
  std::vector<double> best_so_far;
};

}  // namespace epf
