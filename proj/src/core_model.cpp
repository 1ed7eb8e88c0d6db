#include "dip/core_model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "dip/error.hpp"

namespace dip {

LabelSet::LabelSet(std::vector<LabelClass> classes) : classes_(std::move(classes)) {
  std::set<std::string_view> seen;
  std::optional<std::size_t> none;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& name = classes_[i].name;
    if (trim(name).empty()) throw ValidationError("label set: empty class name at index " + std::to_string(i));
    if (!seen.insert(name).second) throw ValidationError("label set: duplicate class '" + name + "'");
    if (name == kNoneLabel) none = i;
  }
  if (!none) throw ValidationError("label set: background class 'None' is missing");
  none_index_ = *none;
}

LabelSet LabelSet::receipt_default() {
  return LabelSet({{"None", false},
                   {"invoicenumber", false},
                   {"documentdate", true},
                   {"creditorname", false},
                   {"grossamount", true},
                   {"netamount", true}});
}

std::optional<std::size_t> LabelSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].name == name) return i;
  }
  return std::nullopt;
}

ScoreMatrix ScoreMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  ScoreMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ValidationError("score matrix: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                            " entries, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

namespace {

std::string shape_message(std::string_view doc_id, std::size_t rows, std::size_t cols, std::size_t exp_rows,
                          std::size_t exp_cols) {
  std::ostringstream os;
  os << "doc_id '" << doc_id << "': score matrix is " << rows << "x" << cols << ", expected " << exp_rows << "x"
     << exp_cols;
  return os.str();
}

std::size_t argmax_row(std::span<const double> row, std::string_view doc_id, std::size_t r) {
  std::optional<std::size_t> best;
  bool any_finite = false;
  for (std::size_t c = 0; c < row.size(); ++c) {
    const double v = row[c];
    if (std::isnan(v)) {
      throw ValidationError("doc_id '" + std::string(doc_id) + "': NaN score at token " + std::to_string(r) +
                            ", class " + std::to_string(c));
    }
    any_finite = any_finite || std::isfinite(v);
    // Strict comparison keeps the earliest class among tied maxima.
    if (!best || v > row[*best]) best = c;
  }
  if (!any_finite) {
    throw ValidationError("doc_id '" + std::string(doc_id) + "': token " + std::to_string(r) +
                          " has no finite score");
  }
  return *best;
}

std::vector<std::size_t> resolve_indices(const ScoreMatrix& scores, const LabelSet& labels,
                                         std::size_t expected_tokens, std::string_view doc_id) {
  if (scores.rows() != expected_tokens || scores.cols() != labels.size()) {
    throw ValidationError(shape_message(doc_id, scores.rows(), scores.cols(), expected_tokens, labels.size()));
  }
  std::vector<std::size_t> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = argmax_row(scores.row(r), doc_id, r);
  return out;
}

}  // namespace

std::vector<std::string> resolve_labels(const ScoreMatrix& scores, const LabelSet& labels,
                                        std::size_t expected_tokens, std::string_view doc_id) {
  const auto indices = resolve_indices(scores, labels, expected_tokens, doc_id);
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(labels.at(i).name);
  return out;
}

IndexedLabels ground_truth_indices(const Corpus& corpus) {
  const auto& labels = corpus.label_set;
  IndexedLabels out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    auto& row = out.emplace_back();
    row.reserve(doc.tokens.size());
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      const auto& gt = doc.tokens[t].gt_label;
      if (!gt) {
        row.push_back(labels.none_index());
        continue;
      }
      const auto idx = labels.index_of(*gt);
      if (!idx) {
        throw ValidationError("doc_id '" + doc.doc_id + "': token " + std::to_string(t) + " has unknown gt_label '" +
                              *gt + "'");
      }
      row.push_back(*idx);
    }
  }
  return out;
}

IndexedLabels prediction_indices(const Corpus& corpus, const PredictionSet& preds) {
  const auto& labels = corpus.label_set;
  IndexedLabels out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    const auto it = preds.find(doc.doc_id);
    if (it == preds.end()) throw ValidationError("doc_id '" + doc.doc_id + "': no prediction");
    const std::size_t n = doc.tokens.size();
    if (const auto* seq = std::get_if<LabelSequence>(&it->second)) {
      if (seq->size() != n) {
        throw ValidationError("doc_id '" + doc.doc_id + "': " + std::to_string(seq->size()) +
                              " predicted labels, expected " + std::to_string(n));
      }
      auto& row = out.emplace_back();
      row.reserve(n);
      for (std::size_t t = 0; t < n; ++t) {
        const auto idx = labels.index_of((*seq)[t]);
        if (!idx) {
          throw ValidationError("doc_id '" + doc.doc_id + "': token " + std::to_string(t) +
                                " has unknown predicted label '" + (*seq)[t] + "'");
        }
        row.push_back(*idx);
      }
    } else {
      out.push_back(resolve_indices(std::get<ScoreMatrix>(it->second), labels, n, doc.doc_id));
    }
  }
  return out;
}

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\n\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  std::set<std::string_view> ids;
  for (const auto& doc : corpus.documents) {
    if (!ids.insert(doc.doc_id).second) out.push_back({doc.doc_id, std::nullopt, "duplicate doc_id"});
    if (doc.tokens.empty()) out.push_back({doc.doc_id, std::nullopt, "document has no tokens"});
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      const auto& tok = doc.tokens[t];
      const auto& b = tok.bbox;
      if (b.x1 > b.x2) out.push_back({doc.doc_id, t, "x1 > x2"});
      if (b.y1 > b.y2) out.push_back({doc.doc_id, t, "y1 > y2"});
      if (b.x1 < 0 || b.y1 < 0 || b.x2 < 0 || b.y2 < 0) out.push_back({doc.doc_id, t, "negative coordinate"});
      if (trim(tok.text).empty()) out.push_back({doc.doc_id, t, "empty text"});
      if (tok.gt_label && !corpus.label_set.contains(*tok.gt_label)) {
        out.push_back({doc.doc_id, t, "unknown gt_label '" + *tok.gt_label + "'"});
      }
    }
  }
  return out;
}

}  // namespace dip
