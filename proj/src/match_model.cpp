#include "citematch/match_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "citematch/error.hpp"

namespace citematch {

namespace {

constexpr const char* kLinearMagic = "citematch-linear";
constexpr int kLinearVersion = 1;

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string format_double(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(context + ": bad number '" + s + "'");
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::istringstream ls(line);
  for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
  if (!line.empty() && line.back() == '\t') cols.emplace_back();
  return cols;
}

// Platt scaling with a small ridge on the slope, fit by damped Newton steps.
std::pair<double, double> fit_calibration(const std::vector<double>& margins,
                                          const std::vector<bool>& labels) {
  const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const double negatives = static_cast<double>(labels.size()) - positives;
  const double hi = (positives + 1.0) / (positives + 2.0);
  const double lo = 1.0 / (negatives + 2.0);
  constexpr double kRidge = 1e-3;

  auto objective = [&](double a, double b) {
    double f = kRidge * a * a;
    for (std::size_t i = 0; i < margins.size(); ++i) {
      const double t = labels[i] ? hi : lo;
      const double z = a * margins[i] + b;
      // -(t log p + (1-t) log(1-p)) in a numerically safe form.
      f += (z >= 0 ? std::log1p(std::exp(-z)) + (1 - t) * z
                   : std::log1p(std::exp(z)) - t * z);
    }
    return f;
  };

  double a = 1.0, b = 0.0;
  double f = objective(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 2 * kRidge * a, gb = 0.0;
    double haa = 2 * kRidge, hab = 0.0, hbb = 1e-12;
    for (std::size_t i = 0; i < margins.size(); ++i) {
      const double t = labels[i] ? hi : lo;
      const double p = logistic(a * margins[i] + b);
      const double d = p - t;
      const double w = std::max(p * (1 - p), 1e-12);
      ga += d * margins[i];
      gb += d;
      haa += w * margins[i] * margins[i];
      hab += w * margins[i];
      hbb += w;
    }
    if (std::fabs(ga) < 1e-9 && std::fabs(gb) < 1e-9) break;
    const double det = haa * hbb - hab * hab;
    if (det <= 0) break;
    const double da = -(hbb * ga - hab * gb) / det;
    const double db = -(haa * gb - hab * ga) / det;
    double step = 1.0;
    bool improved = false;
    while (step > 1e-10) {
      const double fa = objective(a + step * da, b + step * db);
      if (fa < f) {
        a += step * da;
        b += step * db;
        f = fa;
        improved = true;
        break;
      }
      step /= 2;
    }
    if (!improved) break;
  }
  return {a, b};
}

}  // namespace

LinearModel::LinearModel(FeatureMode mode, std::vector<double> weights, double bias,
                         double scale, double offset)
    : mode_(mode), weights_(std::move(weights)), bias_(bias), scale_(scale), offset_(offset) {
  if (weights_.size() != SimilarityFeatures::names(mode_).size()) {
    throw UsageError("weight count does not match the feature mode");
  }
}

double LinearModel::margin(const SimilarityFeatures& f) const {
  if (f.mode != mode_) {
    throw UsageError(std::string("feature mode ") + to_string(f.mode) +
                     " does not match model mode " + to_string(mode_));
  }
  const auto values = f.values();
  return std::inner_product(values.begin(), values.end(), weights_.begin(), bias_);
}

double LinearModel::score(const SimilarityFeatures& f) const {
  return logistic(scale_ * margin(f) + offset_);
}

double LinearModel::midpoint() const { return logistic(offset_); }

void LinearModel::save(std::ostream& out) const {
  out << kLinearMagic << '\t' << kLinearVersion << '\n';
  out << "mode\t" << to_string(mode_) << '\n';
  out << "bias\t" << format_double(bias_) << '\n';
  out << "calibration\t" << format_double(scale_) << '\t' << format_double(offset_) << '\n';
  const auto names = SimilarityFeatures::names(mode_);
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << "w\t" << names[i] << '\t' << format_double(weights_[i]) << '\n';
  }
}

LinearModel LinearModel::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto context = [&] { return "linear model line " + std::to_string(lineno); };
  if (!std::getline(in, line)) throw DataError("empty linear model");
  ++lineno;
  {
    auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0] != kLinearMagic) throw DataError(context() + ": not a linear model");
    if (cols[1] != std::to_string(kLinearVersion)) throw DataError(context() + ": unsupported version");
  }
  std::optional<FeatureMode> mode;
  std::optional<double> bias;
  std::optional<std::pair<double, double>> calibration;
  std::vector<std::pair<std::string, double>> weights;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols[0] == "mode" && cols.size() == 2) {
      mode = parse_feature_mode(cols[1]);
      if (!mode) throw DataError(context() + ": unknown mode '" + cols[1] + "'");
    } else if (cols[0] == "bias" && cols.size() == 2) {
      bias = parse_double(cols[1], context());
    } else if (cols[0] == "calibration" && cols.size() == 3) {
      calibration = {parse_double(cols[1], context()), parse_double(cols[2], context())};
    } else if (cols[0] == "w" && cols.size() == 3) {
      weights.emplace_back(cols[1], parse_double(cols[2], context()));
    } else {
      throw DataError(context() + ": unrecognised record");
    }
  }
  if (!mode || !bias || !calibration) throw DataError("linear model is missing mode, bias or calibration");
  const auto names = SimilarityFeatures::names(*mode);
  if (weights.size() != names.size()) throw DataError("linear model weights do not cover its mode");
  std::vector<double> ordered(names.size());
  std::vector<bool> seen(names.size(), false);
  for (const auto& [name, w] : weights) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError("linear model has unknown feature '" + name + "'");
    const auto k = static_cast<std::size_t>(it - names.begin());
    if (seen[k]) throw DataError("linear model repeats feature '" + name + "'");
    seen[k] = true;
    ordered[k] = w;
  }
  return LinearModel(*mode, std::move(ordered), *bias, calibration->first, calibration->second);
}

void LinearModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  save(out);
  if (!out) throw IoError("write failed: " + path);
}

LinearModel LinearModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load(in);
}

double regularized_hinge(const LinearModel& model, std::span<const LabeledFeatures> data,
                         double lambda) {
  double norm = model.bias() * model.bias();
  for (double w : model.weights()) norm += w * w;
  double loss = 0.0;
  for (const auto& ex : data) {
    const double y = ex.match ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - y * model.margin(ex.features));
  }
  return 0.5 * lambda * norm + (data.empty() ? 0.0 : loss / static_cast<double>(data.size()));
}

LinearModel train_matcher(std::span<const LabeledFeatures> input,
                          const MatcherTrainingOptions& options, MatcherTrainingReport* report) {
  if (input.empty()) throw UsageError("no training data");
  // Canonical order first: the model depends on the examples, not their order.
  std::vector<std::pair<std::vector<double>, std::size_t>> keyed;
  keyed.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    auto v = input[i].features.values();
    v.push_back(input[i].match ? 1.0 : 0.0);
    keyed.emplace_back(std::move(v), i);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<LabeledFeatures> data;
  data.reserve(input.size());
  for (const auto& k : keyed) data.push_back(input[k.second]);

  if (options.epochs < 1) throw UsageError("epochs must be positive");
  if (!(options.lambda > 0)) throw UsageError("lambda must be positive");
  const FeatureMode mode = data.front().features.mode;
  bool any_pos = false, any_neg = false;
  std::vector<std::vector<double>> xs;
  xs.reserve(data.size());
  for (const auto& ex : data) {
    if (ex.features.mode != mode) throw UsageError("training examples mix feature modes");
    (ex.match ? any_pos : any_neg) = true;
    auto v = ex.features.values();
    v.push_back(1.0);  // bias
    xs.push_back(std::move(v));
  }
  if (!any_pos || !any_neg) throw UsageError("training data must contain both classes");

  const std::size_t dim = xs.front().size();
  const double lambda = options.lambda;
  const double radius = 1.0 / std::sqrt(lambda);
  std::vector<double> w(dim, 0.0), sum(dim, 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);

  auto make_model = [&](const std::vector<double>& v) {
    return LinearModel(mode, std::vector<double>(v.begin(), v.end() - 1), v.back());
  };

  std::optional<LinearModel> checkpoint;
  double checkpoint_objective = 0.0;
  double t = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      t += 1.0;
      const double eta = 1.0 / (lambda * t);
      const double y = data[i].match ? 1.0 : -1.0;
      const double m = std::inner_product(w.begin(), w.end(), xs[i].begin(), 0.0);
      const double shrink = 1.0 - eta * lambda;
      for (auto& wk : w) wk *= shrink;
      if (y * m < 1.0) {
        for (std::size_t k = 0; k < dim; ++k) w[k] += eta * y * xs[i][k];
      }
      const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
      if (norm > radius) {
        for (auto& wk : w) wk *= radius / norm;
      }
      for (std::size_t k = 0; k < dim; ++k) sum[k] += w[k];
    }
    std::vector<double> avg(dim);
    for (std::size_t k = 0; k < dim; ++k) avg[k] = sum[k] / t;
    auto candidate = make_model(avg);
    const double obj = regularized_hinge(candidate, data, lambda);
    if (!checkpoint || obj <= checkpoint_objective) {
      checkpoint = candidate;
      checkpoint_objective = obj;
    }
    if (report) {
      report->epoch_objective.push_back(obj);
      report->checkpoint_objective.push_back(checkpoint_objective);
    }
  }

  if (!options.calibrate) return *checkpoint;
  std::vector<double> margins;
  std::vector<bool> labels;
  for (const auto& ex : data) {
    margins.push_back(checkpoint->margin(ex.features));
    labels.push_back(ex.match);
  }
  const auto [scale, offset] = fit_calibration(margins, labels);
  return LinearModel(mode, checkpoint->weights(), checkpoint->bias(), scale, offset);
}

std::vector<LabeledFeatures> read_feature_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty feature table");
  auto header = split_tabs(line);
  if (header.empty() || header.back() != "label") {
    throw DataError("feature table header must end with a 'label' column");
  }
  header.pop_back();
  std::optional<FeatureMode> mode;
  for (auto m : {FeatureMode::Full, FeatureMode::Simple, FeatureMode::Pipeline}) {
    const auto names = SimilarityFeatures::names(m);
    if (std::equal(header.begin(), header.end(), names.begin(), names.end())) mode = m;
  }
  if (!mode) throw DataError("feature table header matches no feature mode");

  std::vector<LabeledFeatures> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    const std::string context = "feature table line " + std::to_string(lineno);
    if (cols.size() != header.size() + 1) throw DataError(context + ": wrong column count");
    std::vector<double> values;
    for (std::size_t k = 0; k < header.size(); ++k) values.push_back(parse_double(cols[k], context));
    const auto& label = cols.back();
    bool match;
    if (label == "match" || label == "1") {
      match = true;
    } else if (label == "non-match" || label == "0") {
      match = false;
    } else {
      throw DataError(context + ": bad label '" + label + "'");
    }
    out.push_back({SimilarityFeatures::from_values(*mode, values), match});
  }
  return out;
}

void write_feature_table(std::ostream& out, std::span<const LabeledFeatures> data) {
  const FeatureMode mode = data.empty() ? FeatureMode::Pipeline : data.front().features.mode;
  for (auto name : SimilarityFeatures::names(mode)) out << name << '\t';
  out << "label\n";
  for (const auto& ex : data) {
    for (double v : ex.features.values()) out << format_double(v) << '\t';
    out << (ex.match ? "match" : "non-match") << '\n';
  }
}

}  // namespace citematch
