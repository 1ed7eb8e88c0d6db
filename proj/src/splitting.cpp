#include "dip/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dip/error.hpp"
#include "dip/random.hpp"

namespace dip {

std::string_view to_string(Scenario s) noexcept { return s == Scenario::S1 ? "s1" : "s2"; }

Scenario parse_scenario(std::string_view text) {
  if (text == "s1" || text == "S1") return Scenario::S1;
  if (text == "s2" || text == "S2") return Scenario::S2;
  throw ValidationError("unknown scenario '" + std::string(text) + "' (expected s1|s2)");
}

std::size_t s1_train_count(std::size_t k, double train_fraction) {
  const auto rounded = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(k) + 0.5));
  return std::clamp<std::size_t>(rounded, 1, k - 1);
}

namespace {

// Document indices grouped by creditor, creditors in order of first appearance.
std::vector<std::vector<std::size_t>> group_by_creditor(const Corpus& corpus) {
  std::map<std::string_view, std::size_t> slot;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto [it, inserted] = slot.try_emplace(corpus.documents[i].creditor_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

}  // namespace

SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  const std::size_t total = corpus.documents.size();
  if (total < 2) throw ValidationError("split needs at least 2 documents");

  auto groups = group_by_creditor(corpus);
  Rng rng(spec.seed);
  std::vector<bool> to_train(total, false);

  if (spec.scenario == Scenario::S1) {
    for (auto& g : groups) {
      if (g.size() == 1) {
        to_train[g.front()] = true;
        continue;
      }
      rng.shuffle(std::span(g));
      const std::size_t n = s1_train_count(g.size(), spec.train_fraction);
      for (std::size_t i = 0; i < n; ++i) to_train[g[i]] = true;
    }
  } else {
    if (groups.size() < 2) throw ValidationError("cannot form disjoint creditor split: corpus has a single creditor");
    rng.shuffle(std::span(groups));
    const double target = spec.train_fraction * static_cast<double>(total);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c + 1 < groups.size() && static_cast<double>(assigned) < target; ++c) {
      for (auto i : groups[c]) to_train[i] = true;
      assigned += groups[c].size();
    }
  }

  SplitResult out;
  std::set<std::string_view> train_cred;
  std::set<std::string_view> test_cred;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& doc = corpus.documents[i];
    if (to_train[i]) {
      out.train_ids.push_back(doc.doc_id);
      train_cred.insert(doc.creditor_id);
    } else {
      out.test_ids.push_back(doc.doc_id);
      test_cred.insert(doc.creditor_id);
    }
  }
  out.train_creditors = train_cred.size();
  out.test_creditors = test_cred.size();
  for (auto c : train_cred) out.shared_creditors += test_cred.count(c);
  return out;
}

}  // namespace dip
