#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dip {

inline constexpr std::string_view kNoneLabel = "None";

/// Pixel box, origin at the upper-left corner of the page image.
struct BoundingBox {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct LabelClass {
  std::string name;
  bool exact_match_required = false;

  friend bool operator==(const LabelClass&, const LabelClass&) = default;
};

/// Ordered class vocabulary. The order fixes score-matrix columns and the
/// tie-break in resolve_labels; the background class must appear exactly once.
class LabelSet {
 public:
  /// Throws ValidationError on duplicate names or a missing/duplicated "None".
  explicit LabelSet(std::vector<LabelClass> classes);

  /// None, invoicenumber, documentdate, creditorname, grossamount, netamount.
  /// Date and currency classes require exact matches.
  static LabelSet receipt_default();

  [[nodiscard]] const std::vector<LabelClass>& classes() const noexcept { return classes_; }
  [[nodiscard]] std::size_t size() const noexcept { return classes_.size(); }
  [[nodiscard]] const LabelClass& at(std::size_t index) const { return classes_.at(index); }
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const { return index_of(name).has_value(); }
  [[nodiscard]] std::size_t none_index() const noexcept { return none_index_; }

  friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.classes_ == b.classes_; }

 private:
  std::vector<LabelClass> classes_;
  std::size_t none_index_ = 0;
};

struct Token {
  std::string text;
  BoundingBox bbox;
  std::optional<std::string> gt_label;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Document {
  std::string doc_id;
  std::string creditor_id;
  std::vector<Token> tokens;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::vector<Document> documents;
  LabelSet label_set = LabelSet::receipt_default();
};

/// Dense row-major n x c matrix of per-token class scores.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Every row must have the same width; throws ValidationError otherwise.
  static ScoreMatrix from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using LabelSequence = std::vector<std::string>;
using DocumentPrediction = std::variant<LabelSequence, ScoreMatrix>;

/// Predictions keyed by doc_id, either as label names or as score rows.
using PredictionSet = std::map<std::string, DocumentPrediction, std::less<>>;

/// Per-row argmax; ties go to the smallest class index. `doc_id` only feeds
/// diagnostics. Throws ValidationError on shape mismatch, NaN, or a row
/// without any finite score.
std::vector<std::string> resolve_labels(const ScoreMatrix& scores, const LabelSet& labels,
                                        std::size_t expected_tokens, std::string_view doc_id = {});

/// Label indices per document, aligned with corpus.documents. Absent gt labels
/// read as the background class.
using IndexedLabels = std::vector<std::vector<std::size_t>>;

IndexedLabels ground_truth_indices(const Corpus& corpus);

/// Resolves every document's prediction to label indices, aligned with
/// corpus.documents. Throws ValidationError naming the doc_id when a document
/// is missing, lengths disagree, or a predicted label is unknown.
IndexedLabels prediction_indices(const Corpus& corpus, const PredictionSet& preds);

struct Violation {
  std::string doc_id;
  std::optional<std::size_t> token_index;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every invariant violation in the corpus; empty iff the corpus is valid.
std::vector<Violation> validate_corpus(const Corpus& corpus);

std::string_view trim(std::string_view s) noexcept;

}  // namespace dip
