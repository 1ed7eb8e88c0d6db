#include "dip/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "dip/error.hpp"

namespace dip::io {

namespace {

struct Cursor {
  const std::string& source;
  std::size_t line;

  [[noreturn]] void schema(const std::string& what) const {
    throw FormatError(FormatError::Kind::Schema, source, line, what);
  }
};

Json parse_text(const std::string& text, const Cursor& at) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Drop the library's exception tag; for JSONL records its "line 1" is
    // relative to the record, so only the column is kept.
    std::string msg = e.what();
    if (const auto tag = msg.find("] "); msg.starts_with("[json.exception") && tag != std::string::npos) {
      msg.erase(0, tag + 2);
    }
    if (at.line > 0) {
      if (const auto pos = msg.find("at line 1, "); pos != std::string::npos) msg.erase(pos + 3, 8);
    }
    throw FormatError(FormatError::Kind::Parse, at.source, at.line, msg);
  }
}

Json parse_whole(std::istream& in, const std::string& source) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text, {source, 0});
}

template <typename Fn>
void for_each_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const Cursor at{source, n};
    Json j = parse_text(line, at);
    if (!j.is_object()) at.schema("line is not a JSON object");
    fn(j, at);
  }
}

const Json& require(const Json& obj, std::string_view key, const Cursor& at) {
  const auto it = obj.find(key);
  if (it == obj.end()) at.schema("missing key '" + std::string(key) + "'");
  return *it;
}

std::string require_string(const Json& obj, std::string_view key, const Cursor& at) {
  const Json& v = require(obj, key, at);
  if (!v.is_string()) at.schema("'" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

double require_number(const Json& v, const std::string& what, const Cursor& at) {
  if (!v.is_number()) at.schema(what + " must be a number");
  return v.get<double>();
}

std::size_t require_count(const Json& v, const std::string& what, const Cursor& at) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    at.schema(what + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::uint64_t read_seed(const Json& v, const Cursor& at) {
  if (!v.is_number_integer()) at.schema("'seed' must be an integer");
  return v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(v.get<std::int64_t>());
}

}  // namespace

LabelSet read_label_set(std::istream& in, const std::string& source) {
  const Json j = parse_whole(in, source);
  const Cursor at{source, 0};
  if (!j.is_object()) at.schema("label set must be a JSON object");
  const Json& classes = require(j, "classes", at);
  if (!classes.is_array() || classes.empty()) at.schema("'classes' must be a non-empty array");
  std::vector<LabelClass> out;
  for (const auto& c : classes) {
    if (!c.is_object()) at.schema("class entry must be an object");
    LabelClass lc;
    lc.name = require_string(c, "name", at);
    if (const auto it = c.find("exact_match_required"); it != c.end()) {
      if (!it->is_boolean()) at.schema("'exact_match_required' must be a boolean");
      lc.exact_match_required = it->get<bool>();
    }
    out.push_back(std::move(lc));
  }
  if (out.front().name != kNoneLabel) at.schema("the first class must be 'None'");
  try {
    return LabelSet(std::move(out));
  } catch (const ValidationError& e) {
    at.schema(e.what());
  }
}

Json label_set_to_json(const LabelSet& labels) {
  Json classes = Json::array();
  for (const auto& c : labels.classes()) {
    classes.push_back({{"name", c.name}, {"exact_match_required", c.exact_match_required}});
  }
  return Json{{"classes", classes}};
}

Corpus read_corpus(std::istream& in, const std::string& source, const LabelSet& labels) {
  Corpus corpus;
  corpus.label_set = labels;
  for_each_line(in, source, [&](const Json& j, const Cursor& at) {
    Document doc;
    doc.doc_id = require_string(j, "doc_id", at);
    doc.creditor_id = require_string(j, "creditor_id", at);
    const Json& tokens = require(j, "tokens", at);
    if (!tokens.is_array()) at.schema("'tokens' must be an array");
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const Json& tj = tokens[t];
      const std::string where = "tokens[" + std::to_string(t) + "]";
      if (!tj.is_object()) at.schema(where + " must be an object");
      Token tok;
      const Json& text = require(tj, "text", at);
      if (!text.is_string()) at.schema(where + ".text must be a string");
      tok.text = text.get<std::string>();
      const Json& bbox = require(tj, "bbox", at);
      if (!bbox.is_array() || bbox.size() != 4) at.schema(where + ".bbox must be [x1, y1, x2, y2]");
      tok.bbox = {require_number(bbox[0], where + ".bbox[0]", at), require_number(bbox[1], where + ".bbox[1]", at),
                  require_number(bbox[2], where + ".bbox[2]", at), require_number(bbox[3], where + ".bbox[3]", at)};
      if (const auto it = tj.find("gt_label"); it != tj.end() && !it->is_null()) {
        if (!it->is_string()) at.schema(where + ".gt_label must be a string or null");
        tok.gt_label = it->get<std::string>();
      }
      doc.tokens.push_back(std::move(tok));
    }
    corpus.documents.push_back(std::move(doc));
  });
  return corpus;
}

Json document_to_json(const Document& doc) {
  Json tokens = Json::array();
  for (const auto& t : doc.tokens) {
    tokens.push_back({{"text", t.text},
                      {"bbox", {t.bbox.x1, t.bbox.y1, t.bbox.x2, t.bbox.y2}},
                      {"gt_label", t.gt_label ? Json(*t.gt_label) : Json(nullptr)}});
  }
  return Json{{"doc_id", doc.doc_id}, {"creditor_id", doc.creditor_id}, {"tokens", std::move(tokens)}};
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents) out << document_to_json(doc).dump() << '\n';
}

PredictionSet read_predictions(std::istream& in, const std::string& source) {
  PredictionSet preds;
  for_each_line(in, source, [&](const Json& j, const Cursor& at) {
    std::string doc_id = require_string(j, "doc_id", at);
    const bool has_labels = j.contains("labels");
    const bool has_scores = j.contains("scores");
    if (has_labels == has_scores) at.schema("exactly one of 'labels' or 'scores' is required");
    DocumentPrediction pred;
    if (has_labels) {
      const Json& labels = j.at("labels");
      if (!labels.is_array()) at.schema("'labels' must be an array");
      LabelSequence seq;
      for (const auto& l : labels) {
        if (!l.is_string()) at.schema("'labels' entries must be strings");
        seq.push_back(l.get<std::string>());
      }
      pred = std::move(seq);
    } else {
      const Json& scores = j.at("scores");
      if (!scores.is_array()) at.schema("'scores' must be an array of rows");
      std::vector<std::vector<double>> rows;
      for (std::size_t r = 0; r < scores.size(); ++r) {
        if (!scores[r].is_array()) at.schema("scores[" + std::to_string(r) + "] must be an array");
        auto& row = rows.emplace_back();
        for (const auto& v : scores[r]) row.push_back(require_number(v, "score", at));
      }
      try {
        pred = ScoreMatrix::from_rows(rows);
      } catch (const ValidationError& e) {
        at.schema(e.what());
      }
    }
    if (!preds.emplace(doc_id, std::move(pred)).second) at.schema("duplicate doc_id '" + doc_id + "'");
  });
  return preds;
}

void write_predictions(std::ostream& out, const Corpus& corpus, const PredictionSet& preds) {
  for (const auto& doc : corpus.documents) {
    const auto it = preds.find(doc.doc_id);
    if (it == preds.end()) throw ValidationError("doc_id '" + doc.doc_id + "': no prediction");
    const auto* seq = std::get_if<LabelSequence>(&it->second);
    if (!seq) throw ValidationError("doc_id '" + doc.doc_id + "': only label-form predictions can be written");
    out << Json{{"doc_id", doc.doc_id}, {"labels", *seq}}.dump() << '\n';
  }
}

FieldTable read_fields(std::istream& in, const std::string& source) {
  FieldTable table;
  for_each_line(in, source, [&](const Json& j, const Cursor& at) {
    std::string doc_id = require_string(j, "doc_id", at);
    const Json& fields = require(j, "fields", at);
    if (!fields.is_array()) at.schema("'fields' must be an array");
    std::vector<FieldValue> values;
    for (const auto& f : fields) {
      if (!f.is_object()) at.schema("field entry must be an object");
      values.push_back({require_string(f, "class", at), require_string(f, "value", at)});
    }
    if (!table.emplace(doc_id, std::move(values)).second) at.schema("duplicate doc_id '" + doc_id + "'");
  });
  return table;
}

MatchPolicy read_policy(std::istream& in, const std::string& source) {
  const Json j = parse_whole(in, source);
  const Cursor at{source, 0};
  if (!j.is_object()) at.schema("policy must be a JSON object");
  MatchPolicy p;
  if (const auto it = j.find("lev_ratio"); it != j.end()) {
    p.lev_ratio = require_number(*it, "'lev_ratio'", at);
    if (p.lev_ratio < 0 || !std::isfinite(p.lev_ratio)) at.schema("'lev_ratio' must be finite and >= 0");
  }
  if (const auto it = j.find("min_lev_bound"); it != j.end()) p.min_lev_bound = require_count(*it, "'min_lev_bound'", at);
  if (const auto it = j.find("window_max_tokens"); it != j.end()) {
    p.window_max_tokens = require_count(*it, "'window_max_tokens'", at);
    if (p.window_max_tokens == 0) at.schema("'window_max_tokens' must be positive");
  }
  if (const auto it = j.find("exact_only_classes"); it != j.end()) {
    if (!it->is_array()) at.schema("'exact_only_classes' must be an array");
    p.exact_only_classes.clear();
    for (const auto& c : *it) {
      if (!c.is_string()) at.schema("'exact_only_classes' entries must be strings");
      p.exact_only_classes.insert(c.get<std::string>());
    }
  }
  return p;
}

CorpusSpec read_corpus_spec(std::istream& in, const std::string& source, const LabelSet& labels) {
  const Json j = parse_whole(in, source);
  const Cursor at{source, 0};
  if (!j.is_object()) at.schema("corpus spec must be a JSON object");
  CorpusSpec s;
  s.label_set = labels;
  if (const auto it = j.find("num_documents"); it != j.end()) s.num_documents = require_count(*it, "'num_documents'", at);
  if (const auto it = j.find("num_creditors"); it != j.end()) s.num_creditors = require_count(*it, "'num_creditors'", at);
  if (const auto it = j.find("tokens_per_doc"); it != j.end()) {
    if (!it->is_array() || it->size() != 2) at.schema("'tokens_per_doc' must be [min, max]");
    s.min_tokens = require_count((*it)[0], "'tokens_per_doc[0]'", at);
    s.max_tokens = require_count((*it)[1], "'tokens_per_doc[1]'", at);
  }
  if (const auto it = j.find("labeled_tokens_per_doc"); it != j.end()) {
    if (!it->is_object()) at.schema("'labeled_tokens_per_doc' must map class to count");
    s.labeled_tokens_per_doc.clear();
    for (const auto& [name, count] : it->items()) {
      s.labeled_tokens_per_doc.emplace_back(name, require_count(count, "'" + name + "' count", at));
    }
  }
  if (const auto it = j.find("seed"); it != j.end()) s.seed = read_seed(*it, at);
  return s;
}

NoiseSpec read_noise_spec(std::istream& in, const std::string& source) {
  const Json j = parse_whole(in, source);
  const Cursor at{source, 0};
  if (!j.is_object()) at.schema("noise spec must be a JSON object");
  NoiseSpec n;
  if (const auto it = j.find("per_class_error_rate"); it != j.end()) {
    if (!it->is_object()) at.schema("'per_class_error_rate' must map class to rate");
    for (const auto& [name, eps] : it->items()) {
      const double v = require_number(eps, "rate for '" + name + "'", at);
      if (!(v >= 0.0 && v <= 1.0)) at.schema("rate for '" + name + "' must lie in [0, 1]");
      n.per_class_error_rate[name] = v;
    }
  }
  if (const auto it = j.find("confusion_target"); it != j.end()) {
    if (!it->is_string()) at.schema("'confusion_target' must be a string");
    try {
      n.confusion_target = parse_confusion_target(it->get<std::string>());
    } catch (const ValidationError& e) {
      at.schema(e.what());
    }
  }
  if (const auto it = j.find("seed"); it != j.end()) n.seed = read_seed(*it, at);
  return n;
}

Json corpus_spec_to_json(const CorpusSpec& spec) {
  Json quota = Json::object();
  for (const auto& [name, count] : spec.labeled_tokens_per_doc) quota[name] = count;
  return Json{{"num_documents", spec.num_documents},
              {"num_creditors", spec.num_creditors},
              {"tokens_per_doc", {spec.min_tokens, spec.max_tokens}},
              {"labeled_tokens_per_doc", std::move(quota)},
              {"seed", spec.seed}};
}

Json noise_spec_to_json(const NoiseSpec& noise) {
  Json rates = Json::object();
  for (const auto& [name, eps] : noise.per_class_error_rate) rates[name] = eps;
  return Json{{"per_class_error_rate", std::move(rates)},
              {"confusion_target", std::string(to_string(noise.confusion_target))},
              {"seed", noise.seed}};
}

}  // namespace dip::io
