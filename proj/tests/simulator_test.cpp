#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "dip/error.hpp"
#include "dip/io.hpp"
#include "dip/metrics.hpp"
#include "dip/simulator.hpp"

namespace dip {
namespace {

std::map<std::string, double, std::less<>> uniform_rates(double eps) {
  std::map<std::string, double, std::less<>> m;
  for (const auto& [name, count] : default_label_quota()) m[name] = eps;
  return m;
}

TEST(GenerateCorpusTest, CreditorsRoundRobin) {
  CorpusSpec spec;
  spec.num_documents = 10;
  spec.num_creditors = 5;
  const auto c = generate_corpus(spec);
  std::map<std::string, int> count;
  for (const auto& d : c.documents) ++count[d.creditor_id];
  ASSERT_EQ(count.size(), 5u);
  for (const auto& [k, n] : count) EXPECT_EQ(n, 2) << k;
}

TEST(GenerateCorpusTest, LabeledTokensPerDocumentAndValidLayout) {
  CorpusSpec spec;
  spec.num_documents = 200;
  spec.min_tokens = 20;
  spec.max_tokens = 60;
  const auto c = generate_corpus(spec);
  EXPECT_TRUE(validate_corpus(c).empty());
  for (const auto& d : c.documents) {
    ASSERT_GE(d.tokens.size(), 20u);
    ASSERT_LE(d.tokens.size(), 60u);
    std::map<std::string, int> per_class;
    for (const auto& t : d.tokens) {
      if (*t.gt_label != "None") ++per_class[*t.gt_label];
    }
    EXPECT_EQ(per_class.size(), 5u);
    for (const auto& [k, n] : per_class) EXPECT_EQ(n, 1);
    for (std::size_t i = 1; i < d.tokens.size(); ++i) {
      const auto& a = d.tokens[i - 1].bbox;
      const auto& b = d.tokens[i].bbox;
      if (a.y1 == b.y1) {
        EXPECT_LE(a.x2, b.x1);  // same row: left to right, no overlap
      } else {
        EXPECT_GE(b.y1, a.y2);  // next row strictly below
      }
    }
  }
}

TEST(GenerateCorpusTest, SameSeedByteIdentical) {
  CorpusSpec spec;
  spec.num_documents = 50;
  spec.seed = 77;
  std::ostringstream a, b;
  io::write_corpus(a, generate_corpus(spec));
  io::write_corpus(b, generate_corpus(spec));
  EXPECT_EQ(a.str(), b.str());
  spec.seed = 78;
  std::ostringstream c;
  io::write_corpus(c, generate_corpus(spec));
  EXPECT_NE(a.str(), c.str());
}

TEST(GenerateCorpusTest, InfeasibleSpecsRejected) {
  CorpusSpec spec;
  spec.min_tokens = 4;
  spec.max_tokens = 10;
  EXPECT_THROW(generate_corpus(spec), ValidationError);  // 5 labeled > 4
  spec = {};
  spec.num_documents = 0;
  EXPECT_THROW(generate_corpus(spec), ValidationError);
  spec = {};
  spec.min_tokens = 30;
  spec.max_tokens = 20;
  EXPECT_THROW(generate_corpus(spec), ValidationError);
  spec = {};
  spec.labeled_tokens_per_doc = {{"total", 1}};
  EXPECT_THROW(generate_corpus(spec), ValidationError);
  spec.labeled_tokens_per_doc = {{"None", 1}};
  EXPECT_THROW(generate_corpus(spec), ValidationError);
}

TEST(SpreadLabelQuotaTest, RoundRobinOverBusinessClasses) {
  EXPECT_EQ(spread_label_quota(1), (LabelQuota{{"invoicenumber", 1}}));
  EXPECT_EQ(spread_label_quota(5), default_label_quota());
  const auto ten = spread_label_quota(10);
  ASSERT_EQ(ten.size(), 5u);
  for (const auto& [name, n] : ten) EXPECT_EQ(n, 2u) << name;
}

TEST(PerturbTest, ZeroNoiseReproducesGroundTruth) {
  CorpusSpec spec;
  spec.num_documents = 100;
  const auto c = generate_corpus(spec);
  NoiseSpec noise;
  noise.per_class_error_rate = uniform_rates(0.0);
  const auto p = perturb(c, noise);
  EXPECT_EQ(dip(c, p), Ratio::one());
  EXPECT_EQ(dip(c, p, DipScope::AllTokens), Ratio::one());
}

TEST(PerturbTest, CertainErrorOnOneClass) {
  CorpusSpec spec;
  spec.num_documents = 100;
  const auto c = generate_corpus(spec);
  for (const auto target : {ConfusionTarget::Uniform, ConfusionTarget::ToNone}) {
    NoiseSpec noise;
    noise.per_class_error_rate = {{"grossamount", 1.0}};
    noise.confusion_target = target;
    const auto p = perturb(c, noise);
    const auto r = evaluate(c, p);
    for (const auto& cr : r.per_class) {
      if (cr.counts.class_name == "grossamount") EXPECT_TRUE(cr.f1.is_zero());
    }
    EXPECT_EQ(r.dip, Ratio::zero());
  }
}

TEST(PerturbTest, ToNoneOnlyProducesMissedDetections) {
  CorpusSpec spec;
  spec.num_documents = 300;
  const auto c = generate_corpus(spec);
  NoiseSpec noise;
  noise.per_class_error_rate = uniform_rates(0.3);
  noise.confusion_target = ConfusionTarget::ToNone;
  const auto r = evaluate(c, perturb(c, noise));
  for (const auto& cr : r.per_class) EXPECT_EQ(cr.counts.fp, 0) << cr.counts.class_name;
}

TEST(PerturbTest, BackgroundFlipsOnlyWhenItsRateIsPositive) {
  CorpusSpec spec;
  spec.num_documents = 50;
  const auto c = generate_corpus(spec);
  NoiseSpec noise;
  noise.per_class_error_rate = {{"None", 0.0}};
  EXPECT_EQ(dip(c, perturb(c, noise), DipScope::AllTokens), Ratio::one());
  noise.per_class_error_rate = {{"None", 0.5}};
  EXPECT_LT(dip(c, perturb(c, noise), DipScope::AllTokens), Ratio::one());
  EXPECT_EQ(dip(c, perturb(c, noise), DipScope::NonNoneOnly), Ratio::one());
}

TEST(PerturbTest, SameSeedSamePredictionsAndRatesOnlyAddFlips) {
  CorpusSpec spec;
  spec.num_documents = 300;
  const auto c = generate_corpus(spec);
  NoiseSpec lo;
  lo.seed = 9;
  lo.per_class_error_rate = uniform_rates(0.05);
  NoiseSpec hi = lo;
  hi.per_class_error_rate = uniform_rates(0.15);
  const auto a = perturb(c, lo);
  EXPECT_EQ(a, perturb(c, lo));
  const auto b = perturb(c, hi);
  const auto gt = ground_truth_indices(c);
  const auto ia = prediction_indices(c, a);
  const auto ib = prediction_indices(c, b);
  for (std::size_t d = 0; d < gt.size(); ++d) {
    for (std::size_t t = 0; t < gt[d].size(); ++t) {
      if (ia[d][t] != gt[d][t]) EXPECT_NE(ib[d][t], gt[d][t]);
    }
  }
  EXPECT_LE(dip(c, b), dip(c, a));
}

TEST(PerturbTest, UnknownClassOrBadRateRejected) {
  CorpusSpec spec;
  spec.num_documents = 3;
  const auto c = generate_corpus(spec);
  NoiseSpec noise;
  noise.per_class_error_rate = {{"total", 0.1}};
  EXPECT_THROW(perturb(c, noise), ValidationError);
  noise.per_class_error_rate = {{"netamount", 1.5}};
  EXPECT_THROW(perturb(c, noise), ValidationError);
}

TEST(ExpectedDipTest, ClosedForm) {
  EXPECT_DOUBLE_EQ(expected_dip(uniform_rates(0.0), default_label_quota()), 1.0);
  EXPECT_DOUBLE_EQ(expected_dip({{"netamount", 0.5}}, {{"netamount", 1}}), 0.5);
  EXPECT_NEAR(expected_dip(uniform_rates(0.04), default_label_quota()), std::pow(0.96, 5), 1e-12);
  EXPECT_NEAR(expected_dip(uniform_rates(0.04), default_label_quota()), 0.815, 5e-4);
  EXPECT_NEAR(expected_dip({{"invoicenumber", 0.1}}, {{"invoicenumber", 3}, {"netamount", 2}}), 0.729, 1e-12);
}

TEST(SimulatorMonteCarlo, TwoPercentOverFiveTokens) {
  CorpusSpec spec;
  spec.num_documents = 10000;
  spec.seed = 2024;
  const auto c = generate_corpus(spec);
  NoiseSpec noise;
  noise.seed = 7;
  noise.per_class_error_rate = uniform_rates(0.02);
  const auto p = perturb(c, noise);
  EXPECT_NEAR(token_accuracy(c, p).value(), 0.98, 0.005);
  EXPECT_NEAR(dip(c, p).value(), std::pow(0.98, 5), 0.02);
}

TEST(SimulatorMonteCarlo, MeasuredDipWithinThreeSigmaOfExpectation) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CorpusSpec spec;
    spec.num_documents = 2000;
    spec.seed = seed;
    spec.labeled_tokens_per_doc = spread_label_quota(1 + seed);
    const auto c = generate_corpus(spec);
    NoiseSpec noise;
    noise.seed = seed * 31;
    for (const auto& q : spec.labeled_tokens_per_doc) noise.per_class_error_rate[q.first] = 0.01 * static_cast<double>(seed);
    const double expected = expected_dip(noise.per_class_error_rate, spec.labeled_tokens_per_doc);
    const double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(spec.num_documents));
    EXPECT_NEAR(dip(c, perturb(c, noise)).value(), expected, 3 * sigma) << "seed " << seed;
  }
}

TEST(SweepTest, RowsFollowGridAndExpectation) {
  CorpusSpec spec;
  spec.num_documents = 500;
  const auto rows = sweep(spec, parse_range("0:0.1:0.05"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(rows[0].epsilon, 0.0);
  EXPECT_DOUBLE_EQ(rows[0].dip, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].avg_f1, 1.0);
  EXPECT_DOUBLE_EQ(rows[2].epsilon, 0.1);
  EXPECT_NEAR(rows[2].expected_dip, std::pow(0.9, 5), 1e-12);
  EXPECT_GT(rows[2].avg_f1, rows[2].dip);
  EXPECT_GE(rows[1].dip, rows[2].dip);
}

TEST(ParseRangeTest, InclusiveGrid) {
  const auto r = parse_range("0:0.2:0.01");
  ASSERT_EQ(r.size(), 21u);
  EXPECT_DOUBLE_EQ(r.back(), 0.2);
  EXPECT_DOUBLE_EQ(r[3], 0.03);
  EXPECT_EQ(parse_range("0.5"), std::vector<double>{0.5});
  EXPECT_THROW(parse_range("0:1"), ValidationError);
  EXPECT_THROW(parse_range("0:1:0"), ValidationError);
  EXPECT_THROW(parse_range("a:1:0.1"), ValidationError);
}

}  // namespace
}  // namespace dip
