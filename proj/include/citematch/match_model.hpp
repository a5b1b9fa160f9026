#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citematch/field_similarity.hpp"

namespace citematch {

// Linear classifier over similarity features with a logistic squashing of
// the margin: score = 1 / (1 + exp(-(scale * (w.f + bias) + offset))).
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(FeatureMode mode, std::vector<double> weights, double bias, double scale = 1.0,
              double offset = 0.0);

  FeatureMode mode() const { return mode_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double scale() const { return scale_; }
  double offset() const { return offset_; }

  double margin(const SimilarityFeatures& f) const;
  double score(const SimilarityFeatures& f) const;
  // Score of a zero margin.
  double midpoint() const;

  void save(std::ostream& out) const;
  static LinearModel load(std::istream& in);
  void save(const std::string& path) const;
  static LinearModel load(const std::string& path);

  bool operator==(const LinearModel&) const = default;

 private:
  FeatureMode mode_ = FeatureMode::Pipeline;
  std::vector<double> weights_;
  double bias_ = 0.0;
  double scale_ = 1.0;
  double offset_ = 0.0;
};

struct LabeledFeatures {
  SimilarityFeatures features;
  bool match = false;
};

struct MatcherTrainingOptions {
  int epochs = 30;
  double lambda = 1e-3;
  std::uint64_t seed = 1;
  bool calibrate = true;
};

struct MatcherTrainingReport {
  // Regularised hinge objective of the averaged weights at the end of every
  // epoch, and of the retained checkpoint (never increases).
  std::vector<double> epoch_objective;
  std::vector<double> checkpoint_objective;
};

// Pegasos-style stochastic subgradient descent on the regularised hinge loss
// (the bias is an always-on feature), followed by a Platt fit of the
// calibration on the training margins.
LinearModel train_matcher(std::span<const LabeledFeatures> data,
                          const MatcherTrainingOptions& options,
                          MatcherTrainingReport* report = nullptr);

// lambda/2 * (|w|^2 + bias^2) + mean hinge loss.
double regularized_hinge(const LinearModel& model, std::span<const LabeledFeatures> data,
                         double lambda);

inline double score(const LinearModel& model, const SimilarityFeatures& f) {
  return model.score(f);
}

inline bool is_match(double score, double threshold = 0.5) { return score >= threshold; }

// Tab-separated feature table: a header naming the mode's features plus a
// final "label" column (match / non-match, or 1 / 0).
std::vector<LabeledFeatures> read_feature_table(std::istream& in);
void write_feature_table(std::ostream& out, std::span<const LabeledFeatures> data);

}  // namespace citematch
