#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcllm/eval_harness.hpp"
#include "arcllm/task_model.hpp"

namespace arcllm {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNumFeatures = 9;

extern const std::array<const char*, kNumFeatures> kFeatureNames;

/// Order matches kFeatureNames: colored pixels (test, mean train), unique
/// colors (test, mean train), pixels changed (test, mean train), input size
/// (test, mean train), number of train pairs.
using FeatureVector = std::array<double, kNumFeatures>;

/// Cells that differ over the common overlap plus every cell outside it.
int pixels_changed(const Grid& input, const Grid& output);

/// Uses the first test pair.
FeatureVector extract_features(const Task& t, Color background = kBlack);

struct FitOptions {
  double l2 = 0.01;
  double lr = 0.1;
  int iters = 5000;
};

struct LogisticModel {
  std::vector<std::string> names;  // kept features
  std::vector<std::size_t> kept;   // indices into the raw feature rows
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> weights;  // standardized scale, one per kept feature
  double intercept = 0;
  std::vector<std::string> warnings;
  std::vector<double> loss_trace;  // loss before each step, then the final loss

  double predict_proba(const std::vector<double>& raw) const;
};

/// Mean negative log-likelihood plus (l2/2)·|w|²; the intercept is not penalized.
/// `x` must already be standardized.
double regularized_loss(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                        const std::vector<double>& w, double b, double l2);

/// Gradient of regularized_loss; returns (dw, db).
std::pair<std::vector<double>, double> loss_gradient(const std::vector<std::vector<double>>& x,
                                                     const std::vector<bool>& y, const std::vector<double>& w,
                                                     double b, double l2);

/// Z-scores each column (population std), drops constant columns with a
/// warning, then runs full-batch gradient descent from zero.
/// FitError unless both classes have at least two examples.
LogisticModel fit(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                  const FitOptions& options = {}, std::vector<std::string> names = {});

LogisticModel fit(const std::vector<FeatureVector>& x, const std::vector<bool>& y, const FitOptions& options = {});

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  int support = 0;
};

struct Evaluation {
  ClassMetrics solved;
  ClassMetrics unsolved;
  double accuracy = 0;
};

/// Threshold 0.5; a zero denominator gives 0.
Evaluation evaluate(const std::vector<bool>& predicted, const std::vector<bool>& actual);
Evaluation evaluate(const LogisticModel& model, const std::vector<std::vector<double>>& x,
                    const std::vector<bool>& y);

/// Markdown: a coefficient table and a precision/recall table (in-sample).
std::string report(const LogisticModel& model, const std::vector<std::vector<double>>& x,
                   const std::vector<bool>& y);

std::vector<std::vector<double>> to_rows(const std::vector<FeatureVector>& x);

struct LabeledSet {
  std::vector<std::string> task_ids;
  std::vector<FeatureVector> features;
  std::vector<bool> solved;
  std::string combination;  // "encoding/strategy/model"
};

/// Joins records with their tasks. Records are filtered by the non-empty
/// selectors; more than one remaining (encoding, strategy, model) is an error.
LabeledSet label_tasks(const std::vector<RunRecord>& records, const std::vector<Task>& tasks,
                       const std::string& encoding = {}, const std::string& strategy = {},
                       const std::string& model = {});

}  // namespace arcllm
