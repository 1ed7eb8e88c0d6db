#include "dip/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "dip/error.hpp"
#include "dip/metrics.hpp"
#include "dip/random.hpp"

namespace dip {

namespace {

constexpr double kPageWidth = 1000.0;
constexpr double kMargin = 20.0;
constexpr double kGlyphWidth = 12.0;
constexpr double kWordGap = 10.0;
constexpr double kRowHeight = 20.0;
constexpr double kRowPitch = 30.0;

std::string random_word(Rng& rng) {
  static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  const std::size_t len = 3 + static_cast<std::size_t>(rng.below(8));
  std::string w(len, ' ');
  for (auto& c : w) c = alphabet[rng.below(alphabet.size())];
  return w;
}

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

LabelQuota default_label_quota() {
  return {{"invoicenumber", 1}, {"documentdate", 1}, {"creditorname", 1}, {"grossamount", 1}, {"netamount", 1}};
}

LabelQuota spread_label_quota(std::size_t total, const LabelSet& labels) {
  LabelQuota quota;
  for (const auto& c : labels.classes()) {
    if (c.name != kNoneLabel) quota.emplace_back(c.name, 0);
  }
  if (quota.empty()) throw ValidationError("label set has no business classes");
  for (std::size_t i = 0; i < total; ++i) ++quota[i % quota.size()].second;
  std::erase_if(quota, [](const auto& q) { return q.second == 0; });
  return quota;
}

std::string_view to_string(ConfusionTarget t) noexcept {
  return t == ConfusionTarget::Uniform ? "uniform" : "to-none";
}

ConfusionTarget parse_confusion_target(std::string_view text) {
  if (text == "uniform") return ConfusionTarget::Uniform;
  if (text == "to-none") return ConfusionTarget::ToNone;
  throw ValidationError("unknown confusion target '" + std::string(text) + "' (expected uniform|to-none)");
}

Corpus generate_corpus(const CorpusSpec& spec) {
  if (spec.num_documents == 0) throw ValidationError("corpus spec: num_documents must be positive");
  if (spec.num_creditors == 0) throw ValidationError("corpus spec: num_creditors must be positive");
  if (spec.min_tokens == 0 || spec.min_tokens > spec.max_tokens) {
    throw ValidationError("corpus spec: token range must satisfy 0 < min_tokens <= max_tokens");
  }
  std::size_t labeled = 0;
  std::set<std::string_view> seen;
  for (const auto& [name, count] : spec.labeled_tokens_per_doc) {
    if (name == kNoneLabel || !spec.label_set.contains(name)) {
      throw ValidationError("corpus spec: '" + name + "' is not a business class of the label set");
    }
    if (!seen.insert(name).second) throw ValidationError("corpus spec: class '" + name + "' listed twice");
    labeled += count;
  }
  if (labeled > spec.min_tokens) {
    throw ValidationError("corpus spec: " + std::to_string(labeled) + " labeled tokens do not fit min_tokens " +
                          std::to_string(spec.min_tokens));
  }

  Corpus corpus;
  corpus.label_set = spec.label_set;
  corpus.documents.reserve(spec.num_documents);
  for (std::size_t i = 0; i < spec.num_documents; ++i) {
    Rng rng(derive_seed(spec.seed, i));
    const std::size_t n = spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);

    Document doc;
    doc.doc_id = numbered("doc-", i, 6);
    doc.creditor_id = numbered("cred-", i % spec.num_creditors, 4);
    doc.tokens.reserve(n);
    double x = kMargin;
    double y = kMargin;
    for (std::size_t t = 0; t < n; ++t) {
      Token tok;
      tok.text = random_word(rng);
      const double w = kGlyphWidth * static_cast<double>(tok.text.size());
      if (x + w > kPageWidth - kMargin) {
        x = kMargin;
        y += kRowPitch;
      }
      tok.bbox = {x, y, x + w, y + kRowHeight};
      tok.gt_label = std::string(kNoneLabel);
      x += w + kWordGap;
      doc.tokens.push_back(std::move(tok));
    }

    // Partial Fisher-Yates picks the labeled positions.
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::size_t next = 0;
    for (const auto& [name, count] : spec.labeled_tokens_per_doc) {
      for (std::size_t c = 0; c < count; ++c, ++next) {
        const std::size_t j = next + rng.below(n - next);
        std::swap(pos[next], pos[j]);
        doc.tokens[pos[next]].gt_label = name;
      }
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

PredictionSet perturb(const Corpus& corpus, const NoiseSpec& noise) {
  const auto& labels = corpus.label_set;
  const std::size_t c = labels.size();
  std::vector<double> rate(c, 0.0);
  for (const auto& [name, eps] : noise.per_class_error_rate) {
    const auto idx = labels.index_of(name);
    if (!idx) throw ValidationError("noise spec: unknown class '" + name + "'");
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("noise spec: rate for '" + name + "' outside [0, 1]");
    rate[*idx] = eps;
  }
  const std::size_t none = labels.none_index();
  const auto gt = ground_truth_indices(corpus);

  PredictionSet preds;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    Rng rng(derive_seed(noise.seed, d));
    LabelSequence out;
    out.reserve(gt[d].size());
    for (const std::size_t k : gt[d]) {
      // Both draws happen for every token so the stream stays aligned across rates.
      const double u = rng.unit();
      const double v = rng.unit();
      const auto pick = [&](std::size_t skip) {
        std::size_t q = std::min(static_cast<std::size_t>(v * static_cast<double>(c - 1)), c - 2);
        if (q >= skip) ++q;
        return q;
      };
      std::size_t p = k;
      if (c > 1 && u < rate[k]) {
        if (noise.confusion_target == ConfusionTarget::ToNone && k != none) {
          p = none;
        } else if (noise.confusion_target == ConfusionTarget::ToNone) {
          p = pick(none);  // background can only flip into a business class
        } else {
          p = pick(k);
        }
      }
      out.push_back(labels.at(p).name);
    }
    preds.emplace(corpus.documents[d].doc_id, std::move(out));
  }
  return preds;
}

double expected_dip(const std::map<std::string, double, std::less<>>& per_class_error_rate,
                    const LabelQuota& labeled_tokens_per_doc) {
  double p = 1.0;
  for (const auto& [name, count] : labeled_tokens_per_doc) {
    const auto it = per_class_error_rate.find(name);
    const double eps = it == per_class_error_rate.end() ? 0.0 : it->second;
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("rate for '" + name + "' outside [0, 1]");
    p *= std::pow(1.0 - eps, static_cast<double>(count));
  }
  return p;
}

std::vector<SweepRow> sweep(const CorpusSpec& spec, const std::vector<double>& epsilons, ConfusionTarget target,
                            std::uint64_t noise_seed) {
  const Corpus corpus = generate_corpus(spec);
  std::set<std::string_view> quota_classes;
  for (const auto& q : spec.labeled_tokens_per_doc) quota_classes.insert(q.first);

  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size());
  for (const double eps : epsilons) {
    NoiseSpec noise;
    noise.confusion_target = target;
    noise.seed = noise_seed;
    for (const auto& q : spec.labeled_tokens_per_doc) noise.per_class_error_rate[q.first] = eps;

    const auto report = evaluate(corpus, perturb(corpus, noise), DipScope::NonNoneOnly);
    double f1_sum = 0.0;
    std::size_t n = 0;
    for (const auto& cr : report.per_class) {
      if (!quota_classes.contains(cr.counts.class_name)) continue;
      f1_sum += cr.f1.value();
      ++n;
    }
    rows.push_back({eps, n == 0 ? 0.0 : f1_sum / static_cast<double>(n), report.dip.value(),
                    expected_dip(noise.per_class_error_rate, spec.labeled_tokens_per_doc)});
  }
  return rows;
}

std::vector<double> parse_range(std::string_view text) {
  std::vector<double> parts;
  std::size_t begin = 0;
  while (true) {
    const auto colon = text.find(':', begin);
    const std::string piece(text.substr(begin, colon == std::string_view::npos ? text.npos : colon - begin));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != piece.size()) throw ValidationError("range: cannot parse '" + piece + "'");
    parts.push_back(v);
    if (colon == std::string_view::npos) break;
    begin = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw ValidationError("range: expected start:stop:step");
  const double start = parts[0];
  const double stop = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || stop < start) throw ValidationError("range: need step > 0 and stop >= start");
  // Count steps once so accumulated rounding cannot add or drop the endpoint.
  const auto steps = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

}  // namespace dip
