#include "dip/metrics.hpp"

#include <map>

#include "dip/error.hpp"

namespace dip {

namespace {

Ratio safe_ratio(std::int64_t num, std::int64_t den) { return den == 0 ? Ratio::zero() : Ratio(num, den); }

bool in_scope(std::size_t gt, std::size_t none_index, DipScope scope) noexcept {
  return scope == DipScope::AllTokens || gt != none_index;
}

}  // namespace

Ratio precision(const ClassCounts& c) { return safe_ratio(c.tp, c.tp + c.fp); }

Ratio recall(const ClassCounts& c) { return safe_ratio(c.tp, c.tp + c.fn); }

Ratio f1(const ClassCounts& c) {
  const Ratio p = precision(c);
  const Ratio r = recall(c);
  const Ratio sum = p + r;
  if (sum.is_zero()) return Ratio::zero();
  return Ratio(2, 1) * (p * r) / sum;
}

ClassReport make_class_report(ClassCounts counts) {
  ClassReport r{std::move(counts), {}, {}, {}};
  r.precision = precision(r.counts);
  r.recall = recall(r.counts);
  r.f1 = f1(r.counts);
  return r;
}

std::string_view to_string(DipScope scope) noexcept {
  return scope == DipScope::AllTokens ? "all" : "non-none";
}

DipScope parse_dip_scope(std::string_view text) {
  if (text == "all") return DipScope::AllTokens;
  if (text == "non-none") return DipScope::NonNoneOnly;
  throw ValidationError("unknown DIP scope '" + std::string(text) + "' (expected all|non-none)");
}

namespace indexed {

ClassCounts class_counts(const IndexedLabels& gt, const IndexedLabels& pred, std::size_t class_index,
                         std::string class_name) {
  ClassCounts c{std::move(class_name), 0, 0, 0};
  for (std::size_t d = 0; d < gt.size(); ++d) {
    for (std::size_t t = 0; t < gt[d].size(); ++t) {
      const bool is_gt = gt[d][t] == class_index;
      const bool is_pred = pred[d][t] == class_index;
      c.tp += is_gt && is_pred;
      c.fp += !is_gt && is_pred;
      c.fn += is_gt && !is_pred;
    }
  }
  return c;
}

std::size_t wrong_documents(const IndexedLabels& gt, const IndexedLabels& pred, std::size_t none_index,
                            DipScope scope) {
  std::size_t wrong = 0;
  for (std::size_t d = 0; d < pred.size(); ++d) {
    for (std::size_t t = 0; t < pred[d].size(); ++t) {
      if (in_scope(gt[d][t], none_index, scope) && pred[d][t] != gt[d][t]) {
        ++wrong;
        break;
      }
    }
  }
  return wrong;
}

}  // namespace indexed

ClassCounts class_counts(const Corpus& corpus, const PredictionSet& preds, std::string_view class_name) {
  const auto idx = corpus.label_set.index_of(class_name);
  if (!idx) throw ValidationError("unknown class '" + std::string(class_name) + "'");
  const auto gt = ground_truth_indices(corpus);
  const auto pred = prediction_indices(corpus, preds);
  return indexed::class_counts(gt, pred, *idx, std::string(class_name));
}

Ratio dip(const Corpus& corpus, const PredictionSet& preds, DipScope scope) {
  if (corpus.documents.empty()) throw ValidationError("DIP is undefined for an empty corpus");
  const auto gt = ground_truth_indices(corpus);
  const auto pred = prediction_indices(corpus, preds);
  const auto total = static_cast<std::int64_t>(corpus.documents.size());
  const auto wrong = static_cast<std::int64_t>(indexed::wrong_documents(gt, pred, corpus.label_set.none_index(), scope));
  return Ratio::one() - Ratio(wrong, total);
}

Ratio token_accuracy(const Corpus& corpus, const PredictionSet& preds, DipScope scope) {
  const auto gt = ground_truth_indices(corpus);
  const auto pred = prediction_indices(corpus, preds);
  const std::size_t none = corpus.label_set.none_index();
  std::int64_t seen = 0;
  std::int64_t right = 0;
  for (std::size_t d = 0; d < gt.size(); ++d) {
    for (std::size_t t = 0; t < gt[d].size(); ++t) {
      if (!in_scope(gt[d][t], none, scope)) continue;
      ++seen;
      right += pred[d][t] == gt[d][t];
    }
  }
  return safe_ratio(right, seen);
}

EvaluationReport evaluate(const Corpus& corpus, const PredictionSet& preds, DipScope scope) {
  if (corpus.documents.empty()) throw ValidationError("cannot evaluate an empty corpus");
  const auto& labels = corpus.label_set;
  const auto gt = ground_truth_indices(corpus);
  const auto pred = prediction_indices(corpus, preds);
  const std::size_t none = labels.none_index();

  EvaluationReport report;
  report.scope = scope;
  report.documents = corpus.documents.size();

  double f1_sum = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k == none) continue;
    report.per_class.push_back(make_class_report(indexed::class_counts(gt, pred, k, labels.at(k).name)));
    f1_sum += report.per_class.back().f1.value();
  }
  if (!report.per_class.empty()) {
    report.macro_f1 = f1_sum / static_cast<double>(report.per_class.size());
  }

  for (std::size_t d = 0; d < gt.size(); ++d) {
    const auto& doc = corpus.documents[d];
    for (std::size_t t = 0; t < gt[d].size(); ++t) {
      if (in_scope(gt[d][t], none, scope) && pred[d][t] != gt[d][t]) {
        report.document_failures.push_back(
            {doc.doc_id, t, doc.tokens[t].text, labels.at(gt[d][t]).name, labels.at(pred[d][t]).name});
        break;
      }
    }
  }
  report.correct_documents = report.documents - report.document_failures.size();
  report.dip = Ratio(static_cast<std::int64_t>(report.correct_documents), static_cast<std::int64_t>(report.documents));
  return report;
}

std::vector<DocumentFailure> failure_extracts(const Corpus& corpus, const PredictionSet& preds, DipScope scope,
                                              std::size_t per_class_limit) {
  const auto& labels = corpus.label_set;
  const auto gt = ground_truth_indices(corpus);
  const auto pred = prediction_indices(corpus, preds);
  const std::size_t none = labels.none_index();

  std::map<std::size_t, std::size_t> taken;
  std::vector<DocumentFailure> out;
  for (std::size_t d = 0; d < gt.size(); ++d) {
    const auto& doc = corpus.documents[d];
    for (std::size_t t = 0; t < gt[d].size(); ++t) {
      const std::size_t g = gt[d][t];
      const std::size_t p = pred[d][t];
      if (!in_scope(g, none, scope) || g == p) continue;
      auto& n = taken[g != none ? g : p];
      if (n >= per_class_limit) continue;
      ++n;
      out.push_back({doc.doc_id, t, doc.tokens[t].text, labels.at(g).name, labels.at(p).name});
    }
  }
  return out;
}

}  // namespace dip
