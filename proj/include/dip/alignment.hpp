#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dip/core_model.hpp"

namespace dip {

/// Decodes UTF-8 into code points. Malformed bytes map to U+DC80..U+DCFF so
/// that distinct inputs stay distinct.
std::u32string decode_utf8(std::string_view s);

/// Edit distance over Unicode code points (insert, delete, substitute).
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// True iff `needle` occurs contiguously in `haystack`. Case-sensitive.
bool is_sub(std::string_view needle, std::string_view haystack) noexcept;

/// Zero when either string contains the other, otherwise their Levenshtein
/// distance.
std::size_t text_distance(std::string_view candidate, std::string_view label_text);

struct FieldValue {
  std::string class_name;
  std::string value;
};

struct MatchPolicy {
  /// Bound is max(min_lev_bound, floor(lev_ratio * len)), clamped to len.
  double lev_ratio = 0.2;
  std::size_t min_lev_bound = 1;
  std::set<std::string, std::less<>> exact_only_classes = {"documentdate", "grossamount", "netamount"};
  std::size_t window_max_tokens = 8;

  [[nodiscard]] std::size_t max_lev_distance(std::size_t label_length) const noexcept;
  [[nodiscard]] bool is_exact_only(std::string_view class_name) const {
    return exact_only_classes.find(class_name) != exact_only_classes.end();
  }
};

/// Closed token range [first, last].
struct TokenSpan {
  std::size_t first = 0;
  std::size_t last = 0;

  [[nodiscard]] std::size_t length() const noexcept { return last - first + 1; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct MatchResult {
  enum class Status { Matched, NoMatch };

  Status status = Status::NoMatch;
  TokenSpan span;
  std::size_t distance = 0;
  /// Number of other windows that tied with the chosen one on every ranking
  /// key except position; surfaced in the alignment audit.
  std::size_t ties = 0;

  [[nodiscard]] bool matched() const noexcept { return status == Status::Matched; }
};

/// Best window of 1..window_max_tokens consecutive tokens for `field`.
///
/// Windows are ranked by text distance, then by the raw Levenshtein distance
/// of the window text (so a window equal to the value beats a window that
/// merely contains it), then earliest start, then shortest length. Exact-only
/// classes accept a window only when its whitespace-normalized text equals the
/// value or contains it verbatim. Tokens flagged in `taken` are skipped.
MatchResult match_field(const FieldValue& field, const Document& doc, const MatchPolicy& policy,
                        const std::vector<bool>& taken = {});

struct Omitted {
  std::string class_name;
  std::string reason;
};

using AnnotationResult = std::variant<Document, Omitted>;

struct FieldMatch {
  std::string class_name;
  MatchResult result;
};

/// Labels every matched span and marks the rest as background. Fields are
/// matched in order; later fields only see tokens not claimed by earlier ones.
/// Any unmatched field omits the whole document. Throws ValidationError on a
/// duplicate class, the background class, or an empty value. When `matches`
/// is given it receives the result of every field attempted.
AnnotationResult annotate_document(const Document& doc, const std::vector<FieldValue>& fields,
                                   const MatchPolicy& policy, std::vector<FieldMatch>* matches = nullptr);

}  // namespace dip
