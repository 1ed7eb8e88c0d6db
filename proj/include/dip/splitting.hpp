#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dip/core_model.hpp"

namespace dip {

/// S1 keeps creditors on both sides; S2 keeps creditor sets disjoint.
enum class Scenario { S1, S2 };

std::string_view to_string(Scenario s) noexcept;
/// Accepts "s1"/"s2" in either case.
Scenario parse_scenario(std::string_view text);

struct SplitSpec {
  Scenario scenario = Scenario::S1;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct SplitResult {
  std::vector<std::string> train_ids;  // corpus order
  std::vector<std::string> test_ids;   // corpus order
  std::size_t train_creditors = 0;
  std::size_t test_creditors = 0;
  std::size_t shared_creditors = 0;

  [[nodiscard]] double achieved_fraction() const noexcept {
    const auto total = train_ids.size() + test_ids.size();
    return total == 0 ? 0.0 : static_cast<double>(train_ids.size()) / static_cast<double>(total);
  }
};

/// Train share for a creditor with k >= 2 documents under S1:
/// round-half-up(fraction * k) clamped to [1, k - 1].
std::size_t s1_train_count(std::size_t k, double train_fraction);

/// Deterministic given corpus order and seed.
///
/// S1 shuffles each creditor's documents and sends s1_train_count of them to
/// train; single-document creditors go to train. S2 shuffles the creditors and
/// assigns whole creditors to train until the train document count first
/// reaches train_fraction of the corpus; at least one creditor always remains
/// for test. Throws ValidationError on fewer than two documents, an S2 corpus
/// with one creditor, or a fraction outside (0, 1).
SplitResult split(const Corpus& corpus, const SplitSpec& spec);

}  // namespace dip
