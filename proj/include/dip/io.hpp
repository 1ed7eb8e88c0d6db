#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dip/alignment.hpp"
#include "dip/core_model.hpp"
#include "dip/simulator.hpp"

#include "json.hpp"

namespace dip::io {

using Json = nlohmann::ordered_json;

// Readers throw FormatError carrying `source` and the 1-based line number.
// Blank lines in JSONL input are skipped.

/// {"classes": [{"name": str, "exact_match_required": bool}]}, "None" first.
LabelSet read_label_set(std::istream& in, const std::string& source);

/// One document per line. gt_label may be a string, null, or absent.
Corpus read_corpus(std::istream& in, const std::string& source, const LabelSet& labels);
void write_corpus(std::ostream& out, const Corpus& corpus);
Json document_to_json(const Document& doc);

/// {"doc_id", "labels": [str]} or {"doc_id", "scores": [[num]]} per line.
PredictionSet read_predictions(std::istream& in, const std::string& source);
/// Writes documents in corpus order; label-form only.
void write_predictions(std::ostream& out, const Corpus& corpus, const PredictionSet& preds);

/// {"doc_id", "fields": [{"class": str, "value": str}]} per line.
using FieldTable = std::map<std::string, std::vector<FieldValue>, std::less<>>;
FieldTable read_fields(std::istream& in, const std::string& source);

/// All keys optional: lev_ratio, min_lev_bound, exact_only_classes,
/// window_max_tokens.
MatchPolicy read_policy(std::istream& in, const std::string& source);

/// Keys: num_documents, num_creditors, tokens_per_doc [min, max],
/// labeled_tokens_per_doc {class: count}, seed. All optional.
CorpusSpec read_corpus_spec(std::istream& in, const std::string& source, const LabelSet& labels);
/// Keys: per_class_error_rate {class: eps}, confusion_target, seed.
NoiseSpec read_noise_spec(std::istream& in, const std::string& source);

Json corpus_spec_to_json(const CorpusSpec& spec);
Json noise_spec_to_json(const NoiseSpec& noise);
Json label_set_to_json(const LabelSet& labels);

}  // namespace dip::io
