#include "dip/report.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>

#include "dip/error.hpp"

namespace dip::report {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

namespace {

Json ratio_json(const Ratio& r) { return Json{{"num", r.num()}, {"den", r.den()}}; }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json to_json(const EvaluationReport& r, const std::string& name) {
  Json per_class = Json::array();
  for (const auto& c : r.per_class) {
    per_class.push_back({{"class", c.counts.class_name},
                         {"tp", c.counts.tp},
                         {"fp", c.counts.fp},
                         {"fn", c.counts.fn},
                         {"precision", c.precision.value()},
                         {"recall", c.recall.value()},
                         {"f1", c.f1.value()},
                         {"exact", {{"precision", ratio_json(c.precision)},
                                    {"recall", ratio_json(c.recall)},
                                    {"f1", ratio_json(c.f1)}}}});
  }
  Json failures = Json::array();
  for (const auto& f : r.document_failures) {
    failures.push_back({{"doc_id", f.doc_id},
                        {"token_index", f.token_index},
                        {"token_text", f.token_text},
                        {"gt", f.gt_label},
                        {"predicted", f.predicted_label}});
  }
  return Json{{"name", name},
              {"scope", std::string(to_string(r.scope))},
              {"documents", r.documents},
              {"correct_documents", r.correct_documents},
              {"per_class", std::move(per_class)},
              {"macro_f1", r.macro_f1},
              {"dip", r.dip.value()},
              {"dip_exact", ratio_json(r.dip)},
              {"document_failures", std::move(failures)}};
}

Summary summarize(const EvaluationReport& r, const std::string& name) {
  Summary s{name, {}, r.dip.value()};
  for (const auto& c : r.per_class) s.f1.emplace_back(c.counts.class_name, c.f1.value());
  return s;
}

Summary summary_from_json(const Json& j, const std::string& source) {
  const auto fail = [&](const std::string& what) -> void {
    throw FormatError(FormatError::Kind::Schema, source, 0, what);
  };
  if (!j.is_object()) fail("report must be a JSON object");
  Summary s;
  if (const auto it = j.find("name"); it != j.end() && it->is_string()) s.name = it->get<std::string>();
  const auto pc = j.find("per_class");
  if (pc == j.end() || !pc->is_array()) fail("report needs a 'per_class' array");
  for (const auto& c : *pc) {
    if (!c.is_object() || !c.contains("class") || !c["class"].is_string() || !c.contains("f1") ||
        !c["f1"].is_number()) {
      fail("'per_class' entries need string 'class' and numeric 'f1'");
    }
    s.f1.emplace_back(c["class"].get<std::string>(), c["f1"].get<double>());
  }
  const auto d = j.find("dip");
  if (d == j.end() || !d->is_number()) fail("report needs a numeric 'dip'");
  s.dip = d->get<double>();
  return s;
}

std::string render_table(const EvaluationReport& r) {
  std::size_t w = 8;
  for (const auto& c : r.per_class) w = std::max(w, c.counts.class_name.size());
  w += 2;
  std::ostringstream os;
  os << pad("label", w) << lpad("tp", 8) << lpad("fp", 8) << lpad("fn", 8) << lpad("precision", 11)
     << lpad("recall", 9) << lpad("f1", 8) << '\n';
  for (const auto& c : r.per_class) {
    os << pad(c.counts.class_name, w) << lpad(std::to_string(c.counts.tp), 8) << lpad(std::to_string(c.counts.fp), 8)
       << lpad(std::to_string(c.counts.fn), 8) << lpad(fixed3(c.precision.value()), 11)
       << lpad(fixed3(c.recall.value()), 9) << lpad(fixed3(c.f1.value()), 8) << '\n';
  }
  os << pad("macro-F1", w) << fixed3(r.macro_f1) << '\n';
  os << pad("DIP", w) << fixed3(r.dip.value()) << "  (" << r.correct_documents << "/" << r.documents
     << " documents fully correct, scope " << to_string(r.scope) << ")\n";
  return os.str();
}

std::string render_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "label,tp,fp,fn,precision,recall,f1,dip\n";
  for (const auto& c : r.per_class) {
    os << csv_field(c.counts.class_name) << ',' << c.counts.tp << ',' << c.counts.fp << ',' << c.counts.fn << ','
       << fixed3(c.precision.value()) << ',' << fixed3(c.recall.value()) << ',' << fixed3(c.f1.value()) << ",\n";
  }
  os << "DIP,,,,,,," << fixed3(r.dip.value()) << '\n';
  return os.str();
}

std::string render_failures(const std::vector<DocumentFailure>& failures) {
  std::ostringstream os;
  for (const auto& f : failures) {
    os << f.doc_id << " token " << f.token_index << " \"" << f.token_text << "\": gt=" << f.gt_label
       << " predicted=" << f.predicted_label << '\n';
  }
  return os.str();
}

Comparison compare(Summary a, Summary b) {
  std::set<std::string> in_a;
  std::set<std::string> in_b;
  for (const auto& [name, v] : a.f1) in_a.insert(name);
  for (const auto& [name, v] : b.f1) in_b.insert(name);
  for (const auto& [name, v] : a.f1) {
    if (!in_b.contains(name)) throw ValidationError("class '" + name + "' missing from report '" + b.name + "'");
  }
  for (const auto& [name, v] : b.f1) {
    if (!in_a.contains(name)) throw ValidationError("class '" + name + "' missing from report '" + a.name + "'");
  }
  if (a.f1.size() != b.f1.size()) throw ValidationError("reports list a different number of classes");
  Comparison c;
  for (std::size_t i = 0; i < a.f1.size(); ++i) {
    if (a.f1[i].first != b.f1[i].first) {
      throw ValidationError("class order differs at column " + std::to_string(i) + ": '" + a.f1[i].first +
                            "' vs '" + b.f1[i].first + "'");
    }
    c.classes.push_back(a.f1[i].first);
  }
  c.a = std::move(a);
  c.b = std::move(b);
  return c;
}

std::string render_comparison(const Comparison& c) {
  std::size_t first = std::max<std::size_t>({8, c.a.name.size(), c.b.name.size()}) + 2;
  std::vector<std::size_t> widths;
  for (const auto& name : c.classes) widths.push_back(std::max<std::size_t>(name.size(), 6) + 2);

  std::ostringstream os;
  os << pad("Scenario", first);
  for (std::size_t i = 0; i < c.classes.size(); ++i) os << lpad(c.classes[i], widths[i]);
  os << lpad("DIP", 8) << '\n';
  const auto row = [&](const std::string& label, auto&& value_at, double dip_value) {
    os << pad(label, first);
    for (std::size_t i = 0; i < c.classes.size(); ++i) os << lpad(fixed3(value_at(i)), widths[i]);
    os << lpad(fixed3(dip_value), 8) << '\n';
  };
  row(c.a.name, [&](std::size_t i) { return c.a.f1[i].second; }, c.a.dip);
  row(c.b.name, [&](std::size_t i) { return c.b.f1[i].second; }, c.b.dip);
  row("delta", [&](std::size_t i) { return c.b.f1[i].second - c.a.f1[i].second; }, c.b.dip - c.a.dip);
  return os.str();
}

std::string render_comparison_csv(const Comparison& c) {
  std::ostringstream os;
  os << "scenario";
  for (const auto& name : c.classes) os << ',' << csv_field(name);
  os << ",DIP\n";
  const auto row = [&](const std::string& label, auto&& value_at, double dip_value) {
    os << csv_field(label);
    for (std::size_t i = 0; i < c.classes.size(); ++i) os << ',' << fixed3(value_at(i));
    os << ',' << fixed3(dip_value) << '\n';
  };
  row(c.a.name, [&](std::size_t i) { return c.a.f1[i].second; }, c.a.dip);
  row(c.b.name, [&](std::size_t i) { return c.b.f1[i].second; }, c.b.dip);
  row("delta", [&](std::size_t i) { return c.b.f1[i].second - c.a.f1[i].second; }, c.b.dip - c.a.dip);
  return os.str();
}

Json comparison_to_json(const Comparison& c) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    rows.push_back({{"class", c.classes[i]},
                    {"a", c.a.f1[i].second},
                    {"b", c.b.f1[i].second},
                    {"delta", c.b.f1[i].second - c.a.f1[i].second}});
  }
  return Json{{"a", c.a.name},
              {"b", c.b.name},
              {"f1", std::move(rows)},
              {"dip", {{"a", c.a.dip}, {"b", c.b.dip}, {"delta", c.b.dip - c.a.dip}}}};
}

}  // namespace dip::report
