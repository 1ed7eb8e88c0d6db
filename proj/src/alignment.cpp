#include "dip/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <tuple>
#include <utility>

#include "dip/error.hpp"

namespace dip {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    const unsigned char b0 = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((byte(i + k) & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (byte(i + k) & 0x3F);
      }
    }
    if (ok) {
      out.push_back(cp);
      i += len;
    } else {
      out.push_back(static_cast<char32_t>(0xDC00 + b0));
      ++i;
    }
  }
  return out;
}

namespace {

// Bit-parallel edit distance (Myers 1999, Hyyro's global variant). The
// pattern must have 1..64 code points.
std::size_t levenshtein_bitparallel(std::u32string_view pattern, std::u32string_view text) {
  const std::size_t m = pattern.size();
  std::vector<std::pair<char32_t, std::uint64_t>> peq;
  peq.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto it = std::lower_bound(peq.begin(), peq.end(), pattern[i],
                                     [](const auto& e, char32_t c) { return e.first < c; });
    if (it != peq.end() && it->first == pattern[i]) {
      it->second |= std::uint64_t{1} << i;
    } else {
      peq.insert(it, {pattern[i], std::uint64_t{1} << i});
    }
  }
  const auto lookup = [&](char32_t c) -> std::uint64_t {
    const auto it =
        std::lower_bound(peq.begin(), peq.end(), c, [](const auto& e, char32_t v) { return e.first < v; });
    return (it != peq.end() && it->first == c) ? it->second : 0;
  };

  const std::uint64_t high = std::uint64_t{1} << (m - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = m;
  for (const char32_t c : text) {
    const std::uint64_t eq = lookup(c);
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & high) {
      ++score;
    } else if (mh & high) {
      --score;
    }
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

std::size_t levenshtein_rows(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

char32_t fold_case(char32_t c) noexcept {
  if (c >= U'A' && c <= U'Z') return c + 32;
  // Latin-1 uppercase block, minus the multiplication sign.
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

std::u32string folded(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) c = fold_case(c);
  return out;
}

bool is_space(char32_t c) noexcept {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' || c == 0xA0;
}

std::u32string normalize_ws(std::u32string_view s) {
  std::u32string out;
  bool pending = false;
  for (const char32_t c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(U' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

bool contains(std::u32string_view haystack, std::u32string_view needle) noexcept {
  return haystack.find(needle) != std::u32string_view::npos;
}

std::size_t abs_diff(std::size_t a, std::size_t b) noexcept { return a > b ? a - b : b - a; }

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return b.size();
  if (a.size() <= 64) return levenshtein_bitparallel(a, b);
  return levenshtein_rows(a, b);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a == b) return 0;
  return levenshtein(decode_utf8(a), decode_utf8(b));
}

bool is_sub(std::string_view needle, std::string_view haystack) noexcept {
  return haystack.find(needle) != std::string_view::npos;
}

std::size_t text_distance(std::string_view candidate, std::string_view label_text) {
  if (is_sub(candidate, label_text) || is_sub(label_text, candidate)) return 0;
  return levenshtein(candidate, label_text);
}

std::size_t MatchPolicy::max_lev_distance(std::size_t label_length) const noexcept {
  const auto relative = static_cast<std::size_t>(std::floor(lev_ratio * static_cast<double>(label_length)));
  return std::min(label_length, std::max(min_lev_bound, relative));
}

MatchResult match_field(const FieldValue& field, const Document& doc, const MatchPolicy& policy,
                        const std::vector<bool>& taken) {
  const bool exact = policy.is_exact_only(field.class_name);
  const std::u32string value = decode_utf8(trim(field.value));
  const std::u32string value_norm = normalize_ws(value);
  const std::u32string value_fold = folded(value);
  const std::size_t bound = policy.max_lev_distance(value.size());

  std::vector<std::u32string> token_text;
  token_text.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) token_text.push_back(decode_utf8(t.text));
  const auto is_taken = [&](std::size_t i) { return i < taken.size() && taken[i]; };

  // (text distance, raw distance, start, length)
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
  std::optional<Key> best;
  std::size_t ties = 0;

  const std::size_t n = token_text.size();
  for (std::size_t start = 0; start < n; ++start) {
    std::u32string window;
    for (std::size_t len = 1; len <= policy.window_max_tokens && start + len <= n; ++len) {
      const std::size_t idx = start + len - 1;
      if (is_taken(idx)) break;
      if (len > 1) window.push_back(U' ');
      window += token_text[idx];

      std::size_t delta = 0;
      std::size_t raw = 0;
      if (exact) {
        const std::u32string window_norm = normalize_ws(window);
        if (window_norm != value_norm && !contains(window_norm, value_norm)) continue;
        raw = levenshtein(window_norm, value_norm);
      } else {
        const std::u32string window_fold = folded(window);
        if (contains(window_fold, value_fold) || contains(value_fold, window_fold)) {
          raw = levenshtein(window, value);
        } else {
          if (abs_diff(window.size(), value.size()) > bound) continue;
          delta = levenshtein(window, value);
          if (delta > bound) continue;
          raw = delta;
        }
      }

      // Windows are visited in (start, length) order, so the first window
      // reaching a given (delta, raw) pair is also the positional winner.
      const auto rank = std::pair{delta, raw};
      if (!best || rank < std::pair{std::get<0>(*best), std::get<1>(*best)}) {
        best = Key{delta, raw, start, len};
        ties = 0;
      } else if (rank == std::pair{std::get<0>(*best), std::get<1>(*best)}) {
        ++ties;
      }
    }
  }

  MatchResult result;
  if (!best) return result;
  result.status = MatchResult::Status::Matched;
  result.distance = std::get<0>(*best);
  result.span = {std::get<2>(*best), std::get<2>(*best) + std::get<3>(*best) - 1};
  result.ties = ties;
  return result;
}

AnnotationResult annotate_document(const Document& doc, const std::vector<FieldValue>& fields,
                                   const MatchPolicy& policy, std::vector<FieldMatch>* matches) {
  std::set<std::string_view> seen;
  for (const auto& f : fields) {
    if (f.class_name == kNoneLabel) {
      throw ValidationError("doc_id '" + doc.doc_id + "': field uses the background class");
    }
    if (trim(f.value).empty()) {
      throw ValidationError("doc_id '" + doc.doc_id + "': empty value for class '" + f.class_name + "'");
    }
    if (!seen.insert(f.class_name).second) {
      throw ValidationError("doc_id '" + doc.doc_id + "': duplicate field class '" + f.class_name + "'");
    }
  }

  std::vector<bool> taken(doc.tokens.size(), false);
  std::vector<std::pair<TokenSpan, std::string_view>> spans;
  for (const auto& f : fields) {
    const MatchResult m = match_field(f, doc, policy, taken);
    if (matches) matches->push_back({f.class_name, m});
    if (!m.matched()) {
      const bool overlap = match_field(f, doc, policy).matched();
      return Omitted{f.class_name, overlap ? "match overlaps an earlier field" : "no window within distance bound"};
    }
    for (std::size_t i = m.span.first; i <= m.span.last; ++i) taken[i] = true;
    spans.emplace_back(m.span, f.class_name);
  }

  Document out = doc;
  for (auto& t : out.tokens) t.gt_label = std::string(kNoneLabel);
  for (const auto& [span, name] : spans) {
    for (std::size_t i = span.first; i <= span.last; ++i) out.tokens[i].gt_label = std::string(name);
  }
  return out;
}

}  // namespace dip
