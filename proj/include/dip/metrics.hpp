#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dip/core_model.hpp"
#include "dip/ratio.hpp"

namespace dip {

/// Token-level one-vs-rest tallies for a single class.
struct ClassCounts {
  std::string class_name;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

// Zero denominators yield 0.
Ratio precision(const ClassCounts& c);
Ratio recall(const ClassCounts& c);
Ratio f1(const ClassCounts& c);

struct ClassReport {
  ClassCounts counts;
  Ratio precision;
  Ratio recall;
  Ratio f1;
};

ClassReport make_class_report(ClassCounts counts);

/// Which tokens can make a document wrong.
enum class DipScope {
  AllTokens,
  NonNoneOnly,
};

std::string_view to_string(DipScope scope) noexcept;
/// Accepts "all" or "non-none".
DipScope parse_dip_scope(std::string_view text);

struct DocumentFailure {
  std::string doc_id;
  std::size_t token_index = 0;
  std::string token_text;
  std::string gt_label;
  std::string predicted_label;

  friend bool operator==(const DocumentFailure&, const DocumentFailure&) = default;
};

struct EvaluationReport {
  DipScope scope = DipScope::NonNoneOnly;
  std::vector<ClassReport> per_class;  // label-set order, background excluded
  double macro_f1 = 0.0;
  Ratio dip;
  std::size_t documents = 0;
  std::size_t correct_documents = 0;
  std::vector<DocumentFailure> document_failures;  // first failure per wrong document
};

/// Throws ValidationError when `class_name` is unknown or a document lacks a
/// usable prediction.
ClassCounts class_counts(const Corpus& corpus, const PredictionSet& preds, std::string_view class_name);

/// Fraction of documents whose in-scope tokens are all predicted correctly.
/// Throws ValidationError on an empty corpus.
Ratio dip(const Corpus& corpus, const PredictionSet& preds, DipScope scope = DipScope::NonNoneOnly);

/// Micro accuracy over in-scope tokens; zero when no token is in scope.
Ratio token_accuracy(const Corpus& corpus, const PredictionSet& preds, DipScope scope = DipScope::NonNoneOnly);

EvaluationReport evaluate(const Corpus& corpus, const PredictionSet& preds,
                          DipScope scope = DipScope::NonNoneOnly);

/// Up to `per_class_limit` mismatched in-scope tokens per class, in corpus
/// order. A mismatch is filed under its gt class, or under the predicted class
/// when the gt is background.
std::vector<DocumentFailure> failure_extracts(const Corpus& corpus, const PredictionSet& preds, DipScope scope,
                                              std::size_t per_class_limit);

/// Lower-level entry points on pre-resolved label indices.
namespace indexed {

ClassCounts class_counts(const IndexedLabels& gt, const IndexedLabels& pred, std::size_t class_index,
                         std::string class_name);
/// Counts of wrong documents following the loop-with-break formulation.
std::size_t wrong_documents(const IndexedLabels& gt, const IndexedLabels& pred, std::size_t none_index,
                            DipScope scope);

}  // namespace indexed

}  // namespace dip
