#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dip/io.hpp"
#include "dip/metrics.hpp"

namespace dip::report {

using io::Json;

/// Fixed three-decimal rendering; negative zero prints as 0.000.
std::string fixed3(double v);

/// Full-precision JSON mirror of an EvaluationReport.
Json to_json(const EvaluationReport& r, const std::string& name);

/// The part of a report that comparisons consume: per-class F1 in label order
/// and DIP, at full precision.
struct Summary {
  std::string name;
  std::vector<std::pair<std::string, double>> f1;
  double dip = 0;
};

Summary summarize(const EvaluationReport& r, const std::string& name);
/// Requires "per_class" [{"class", "f1"}] and "dip"; throws FormatError
/// (schema) otherwise.
Summary summary_from_json(const Json& j, const std::string& source);

/// Per-class precision/recall/F1 plus macro-F1 and DIP.
std::string render_table(const EvaluationReport& r);
/// label,tp,fp,fn,precision,recall,f1,dip with one row per class and a final
/// DIP row.
std::string render_csv(const EvaluationReport& r);
std::string render_failures(const std::vector<DocumentFailure>& failures);

struct Comparison {
  std::vector<std::string> classes;  // column order
  Summary a;
  Summary b;
};

/// Throws ValidationError naming the first class present in one report but
/// not the other, or when the class order differs.
Comparison compare(Summary a, Summary b);

/// Scenario | classes... | DIP with rows for a, b and the delta b - a.
std::string render_comparison(const Comparison& c);
std::string render_comparison_csv(const Comparison& c);
Json comparison_to_json(const Comparison& c);

}  // namespace dip::report
