#include "arcllm/solvability_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace arcllm {

const std::array<const char*, kNumFeatures> kFeatureNames = {
    "Colored pixels in test input",
    "Mean colored pixels in train inputs",
    "Unique colors in test input",
    "Mean unique colors in train inputs",
    "Pixels changed in test pair",
    "Mean pixels changed in train pairs",
    "Test input size",
    "Mean train input size",
    "Number of train pairs",
};

namespace {

int colored(const Grid& g, Color background) {
  return static_cast<int>(std::count_if(g.cells().begin(), g.cells().end(), [&](Color c) { return c != background; }));
}

int unique_colors(const Grid& g, Color background) {
  std::set<int> seen;
  for (Color c : g.cells()) {
    if (c != background) seen.insert(c.code());
  }
  return static_cast<int>(seen.size());
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear(const std::vector<double>& row, const std::vector<double>& w, double b) {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
  return z;
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int pixels_changed(const Grid& input, const Grid& output) {
  const int h = std::min(input.height(), output.height());
  const int w = std::min(input.width(), output.width());
  int changed = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) changed += input.at(r, c) != output.at(r, c);
  }
  const int overlap = h * w;
  changed += input.height() * input.width() - overlap;
  changed += output.height() * output.width() - overlap;
  return changed;
}

FeatureVector extract_features(const Task& t, Color background) {
  FeatureVector f{};
  if (!t.test.empty()) {
    const auto& test = t.test.front();
    f[0] = colored(test.input, background);
    f[2] = unique_colors(test.input, background);
    f[4] = pixels_changed(test.input, test.output);
    f[6] = test.input.height() * test.input.width();
  }
  if (!t.train.empty()) {
    for (const auto& p : t.train) {
      f[1] += colored(p.input, background);
      f[3] += unique_colors(p.input, background);
      f[5] += pixels_changed(p.input, p.output);
      f[7] += p.input.height() * p.input.width();
    }
    const double n = static_cast<double>(t.train.size());
    f[1] /= n;
    f[3] /= n;
    f[5] /= n;
    f[7] /= n;
  }
  f[8] = static_cast<double>(t.train.size());
  return f;
}

double regularized_loss(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                        const std::vector<double>& w, double b, double l2) {
  double nll = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = linear(x[i], w, b);
    nll += softplus(z) - (y[i] ? z : 0.0);
  }
  double penalty = 0;
  for (double wj : w) penalty += wj * wj;
  return nll / static_cast<double>(x.size()) + 0.5 * l2 * penalty;
}

std::pair<std::vector<double>, double> loss_gradient(const std::vector<std::vector<double>>& x,
                                                     const std::vector<bool>& y, const std::vector<double>& w,
                                                     double b, double l2) {
  std::vector<double> dw(w.size(), 0.0);
  double db = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = sigmoid(linear(x[i], w, b)) - (y[i] ? 1.0 : 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) dw[j] += r * x[i][j];
    db += r;
  }
  const double n = static_cast<double>(x.size());
  for (std::size_t j = 0; j < w.size(); ++j) dw[j] = dw[j] / n + l2 * w[j];
  return {dw, db / n};
}

double LogisticModel::predict_proba(const std::vector<double>& raw) const {
  double z = intercept;
  for (std::size_t j = 0; j < kept.size(); ++j) z += weights[j] * (raw.at(kept[j]) - mean[j]) / stddev[j];
  return sigmoid(z);
}

LogisticModel fit(const std::vector<std::vector<double>>& x, const std::vector<bool>& y, const FitOptions& options,
                  std::vector<std::string> names) {
  if (x.size() != y.size()) throw FitError("feature and label counts differ");
  const auto positives = std::count(y.begin(), y.end(), true);
  const auto negatives = static_cast<std::ptrdiff_t>(y.size()) - positives;
  if (positives < 2 || negatives < 2) {
    throw FitError("need at least two examples of each class (got " + std::to_string(positives) + " solved, " +
                   std::to_string(negatives) + " unsolved)");
  }
  const std::size_t d = x.front().size();
  for (const auto& row : x) {
    if (row.size() != d) throw FitError("ragged feature rows");
    for (double v : row) {
      if (!std::isfinite(v)) throw FitError("non-finite feature value");
    }
  }
  if (names.empty()) {
    for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
  }

  LogisticModel m;
  const double n = static_cast<double>(x.size());
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0;
    for (const auto& row : x) mu += row[j];
    mu /= n;
    double var = 0;
    for (const auto& row : x) var += (row[j] - mu) * (row[j] - mu);
    const double sd = std::sqrt(var / n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mu)))) {
      m.warnings.push_back("dropped constant feature: " + names[j]);
      continue;
    }
    m.kept.push_back(j);
    m.names.push_back(names[j]);
    m.mean.push_back(mu);
    m.stddev.push_back(sd);
  }

  std::vector<std::vector<double>> z(x.size(), std::vector<double>(m.kept.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < m.kept.size(); ++j) z[i][j] = (x[i][m.kept[j]] - m.mean[j]) / m.stddev[j];
  }

  m.weights.assign(m.kept.size(), 0.0);
  m.loss_trace.reserve(static_cast<std::size_t>(options.iters) + 1);
  for (int it = 0; it < options.iters; ++it) {
    m.loss_trace.push_back(regularized_loss(z, y, m.weights, m.intercept, options.l2));
    const auto [dw, db] = loss_gradient(z, y, m.weights, m.intercept, options.l2);
    for (std::size_t j = 0; j < dw.size(); ++j) m.weights[j] -= options.lr * dw[j];
    m.intercept -= options.lr * db;
  }
  m.loss_trace.push_back(regularized_loss(z, y, m.weights, m.intercept, options.l2));
  return m;
}

std::vector<std::vector<double>> to_rows(const std::vector<FeatureVector>& x) {
  std::vector<std::vector<double>> rows;
  rows.reserve(x.size());
  for (const auto& f : x) rows.emplace_back(f.begin(), f.end());
  return rows;
}

LogisticModel fit(const std::vector<FeatureVector>& x, const std::vector<bool>& y, const FitOptions& options) {
  return fit(to_rows(x), y, options, std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end()));
}

Evaluation evaluate(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (predicted[i]) {
      (actual[i] ? tp : fp)++;
    } else {
      (actual[i] ? fn : tn)++;
    }
  }
  auto ratio = [](int a, int b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; };
  Evaluation e;
  e.solved = {ratio(tp, tp + fp), ratio(tp, tp + fn), tp + fn};
  e.unsolved = {ratio(tn, tn + fn), ratio(tn, tn + fp), tn + fp};
  e.accuracy = ratio(tp + tn, static_cast<int>(actual.size()));
  return e;
}

Evaluation evaluate(const LogisticModel& model, const std::vector<std::vector<double>>& x,
                    const std::vector<bool>& y) {
  std::vector<bool> predicted;
  for (const auto& row : x) predicted.push_back(model.predict_proba(row) >= 0.5);
  return evaluate(predicted, y);
}

std::string report(const LogisticModel& model, const std::vector<std::vector<double>>& x,
                   const std::vector<bool>& y) {
  const Evaluation e = evaluate(model, x, y);
  std::ostringstream md;
  md << "## Logistic regression coefficients (standardized features)\n\n"
     << "| Feature | Coefficient |\n|---|---:|\n";
  for (std::size_t j = 0; j < model.kept.size(); ++j) md << "| " << model.names[j] << " | " << fmt(model.weights[j]) << " |\n";
  md << "| Intercept | " << fmt(model.intercept) << " |\n";
  for (const auto& w : model.warnings) md << "\nNote: " << w << "\n";
  md << "\n## Precision and recall (in-sample, threshold 0.5)\n\n"
     << "| Class | Precision | Recall | Support |\n|---|---:|---:|---:|\n"
     << "| Solved | " << fmt(e.solved.precision, 2) << " | " << fmt(e.solved.recall, 2) << " | " << e.solved.support
     << " |\n"
     << "| Unsolved | " << fmt(e.unsolved.precision, 2) << " | " << fmt(e.unsolved.recall, 2) << " | "
     << e.unsolved.support << " |\n\n"
     << "Accuracy: " << fmt(e.accuracy, 2) << " over " << y.size() << " tasks.\n";
  return md.str();
}

LabeledSet label_tasks(const std::vector<RunRecord>& records, const std::vector<Task>& tasks,
                       const std::string& encoding, const std::string& strategy, const std::string& model) {
  std::map<std::string, const Task*> by_id;
  for (const auto& t : tasks) by_id[t.id] = &t;

  std::set<std::string> combos;
  std::vector<const RunRecord*> kept;
  for (const auto& r : records) {
    if ((!encoding.empty() && r.encoding != encoding) || (!strategy.empty() && r.strategy != strategy) ||
        (!model.empty() && r.model != model)) {
      continue;
    }
    combos.insert(r.encoding + "/" + r.strategy + "/" + r.model);
    kept.push_back(&r);
  }
  if (combos.empty()) throw ConfigError("no records match the selection");
  if (combos.size() > 1) {
    std::string list;
    for (const auto& c : combos) list += " " + c;
    throw ConfigError("records span several combinations, select one with --encoding/--strategy/--model:" + list);
  }

  LabeledSet out;
  out.combination = *combos.begin();
  std::map<std::string, bool> labels;
  for (const auto* r : kept) labels[r->task_id] = r->verdict == Verdict::Solved;
  for (const auto& [id, solved] : labels) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("record for unknown task " + id);
    out.task_ids.push_back(id);
    out.features.push_back(extract_features(*it->second));
    out.solved.push_back(solved);
  }
  return out;
}

}  // namespace arcllm
