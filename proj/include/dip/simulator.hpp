#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dip/core_model.hpp"

namespace dip {

/// (class name, labeled tokens of that class per document)
using LabelQuota = std::vector<std::pair<std::string, std::size_t>>;

/// One token of each business class in the receipt label set.
LabelQuota default_label_quota();

/// `total` labeled tokens dealt round-robin over the business classes of
/// `labels` in label-set order (k = 10 over five classes gives two each).
LabelQuota spread_label_quota(std::size_t total, const LabelSet& labels = LabelSet::receipt_default());

struct CorpusSpec {
  std::size_t num_documents = 1000;
  std::size_t num_creditors = 50;
  std::size_t min_tokens = 20;
  std::size_t max_tokens = 40;
  LabelQuota labeled_tokens_per_doc = default_label_quota();
  std::uint64_t seed = 0;
  LabelSet label_set = LabelSet::receipt_default();
};

enum class ConfusionTarget { Uniform, ToNone };

std::string_view to_string(ConfusionTarget t) noexcept;
/// Accepts "uniform" or "to-none".
ConfusionTarget parse_confusion_target(std::string_view text);

struct NoiseSpec {
  std::map<std::string, double, std::less<>> per_class_error_rate;  // absent classes never flip
  ConfusionTarget confusion_target = ConfusionTarget::Uniform;
  std::uint64_t seed = 0;
};

/// Synthetic annotated corpus. Document i draws from derive_seed(seed, i);
/// creditors are assigned round-robin, tokens are laid out left to right in
/// non-overlapping rows from the top of the page. Throws ValidationError when
/// the quota does not fit min_tokens or the spec is otherwise infeasible.
Corpus generate_corpus(const CorpusSpec& spec);

/// Predictions derived from the gt labels: each token of class k is replaced
/// with probability rate(k) by a wrong label chosen per confusion_target.
/// Every token consumes two uniform draws whether or not it flips, so raising a
/// rate under a fixed seed only adds flips.
PredictionSet perturb(const Corpus& corpus, const NoiseSpec& noise);

/// Product over classes of (1 - rate)^count: the DIP expected when token
/// errors are independent.
double expected_dip(const std::map<std::string, double, std::less<>>& per_class_error_rate,
                    const LabelQuota& labeled_tokens_per_doc);

struct SweepRow {
  double epsilon = 0;
  double avg_f1 = 0;
  double dip = 0;
  double expected_dip = 0;
};

/// For each epsilon, perturbs one generated corpus with that rate on every
/// quota class and records the mean F1 over the quota classes, the measured
/// DIP (background excluded), and expected_dip.
std::vector<SweepRow> sweep(const CorpusSpec& spec, const std::vector<double>& epsilons,
                            ConfusionTarget target = ConfusionTarget::Uniform, std::uint64_t noise_seed = 1);

/// Parses "start:stop:step" into an inclusive grid.
std::vector<double> parse_range(std::string_view text);

}  // namespace dip
