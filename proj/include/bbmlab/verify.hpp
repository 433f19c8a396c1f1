#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bbmlab/ensemble.hpp"

namespace bbmlab {

/// One checked prediction: pass iff the observation meets the prediction
/// within the stated tolerance (the comparison sense is given by the check).
struct Verdict {
  std::string check;
  double observed = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteOptions {
  std::uint64_t seed = 20240607;
  std::size_t reps = 0;  // 0 selects the suite default
  double t = 0.0;        // 0 selects the suite default
  double dt = 1e-2;
  unsigned workers = 1;
};

/// Names accepted by run_suite, in their canonical order.
std::vector<std::string> suite_names();

/// Runs one suite. Throws InvalidArgument for an unknown name.
std::vector<Verdict> run_suite(const std::string& name, const SuiteOptions& options);

bool all_pass(const std::vector<Verdict>& verdicts);

/// Stopping line of a barrier at 0 from time 0, started at x: kill counts,
/// kill-time law and the tail beyond s, checked against their closed forms.
struct StoppingLineStudy {
  std::vector<Verdict> verdicts;
  std::vector<double> kill_times;
  std::vector<double> completed_counts;  // one per replicate
};
StoppingLineStudy stopping_line_study(const SuiteOptions& options, double x, double s, double horizon,
                                      std::size_t reps);

/// Verdicts of the fluctuation checks over an ensemble produced by
/// run_fluctuation_ensemble with the derivative martingale as Z_t(F).
std::vector<Verdict> fluctuation_verdicts(const std::vector<FluctuationSample>& samples);

/// Moments of S = sum over survivors of e^{-X} 1{lo <= X <= hi} for a system
/// started at x and killed at 0, observed at time t.
struct ManyToTwo {
  double first = 0.0;
  double second = 0.0;
  double diagonal = 0.0;         // the single-particle term
  double branch_integral = 0.0;  // the term multiplied by the pair constant
};
ManyToTwo many_to_two_prediction(double x, double t, double lo, double hi, double pair_constant);

}  // namespace bbmlab
