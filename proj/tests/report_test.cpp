#include <gtest/gtest.h>

#include <random>

#include "dip/error.hpp"
#include "dip/report.hpp"
#include "oracles.hpp"

namespace dip::report {
namespace {

Summary summary(std::string name, std::vector<std::pair<std::string, double>> f1, double dip) {
  return Summary{std::move(name), std::move(f1), dip};
}

EvaluationReport small_report() {
  Corpus c;
  c.label_set = LabelSet({{"None", false}, {"A", false}, {"B", false}});
  c.documents.push_back({"d0", "c", {{"x", {0, 0, 1, 1}, "A"}, {"y", {0, 0, 1, 1}, "B"}}});
  c.documents.push_back({"d1", "c", {{"x", {0, 0, 1, 1}, "A"}, {"y", {0, 0, 1, 1}, "None"}}});
  PredictionSet p;
  p.emplace("d0", LabelSequence{"A", "A"});
  p.emplace("d1", LabelSequence{"A", "None"});
  return evaluate(c, p);
}

TEST(Fixed3Test, RoundsAndDropsNegativeZero) {
  EXPECT_EQ(fixed3(0.8154), "0.815");
  EXPECT_EQ(fixed3(1.0), "1.000");
  EXPECT_EQ(fixed3(-0.0004), "0.000");
  EXPECT_EQ(fixed3(-0.571), "-0.571");
}

TEST(RenderTest, TableAndCsv) {
  const auto r = small_report();
  const auto table = render_table(r);
  EXPECT_NE(table.find("DIP"), std::string::npos);
  EXPECT_NE(table.find("0.500"), std::string::npos);
  EXPECT_NE(table.find("1/2 documents fully correct"), std::string::npos);

  EXPECT_EQ(render_csv(r),
            "label,tp,fp,fn,precision,recall,f1,dip\n"
            "A,2,1,0,0.667,1.000,0.800,\n"
            "B,0,0,1,0.000,0.000,0.000,\n"
            "DIP,,,,,,,0.500\n");
  EXPECT_EQ(render_failures(r.document_failures), "d0 token 1 \"y\": gt=B predicted=A\n");
}

TEST(JsonTest, ExactFieldsPresent) {
  const auto j = to_json(small_report(), "s1");
  EXPECT_EQ(j["name"], "s1");
  EXPECT_EQ(j["scope"], "non-none");
  EXPECT_EQ(j["dip_exact"]["num"], 1);
  EXPECT_EQ(j["dip_exact"]["den"], 2);
  EXPECT_EQ(j["per_class"][0]["exact"]["f1"]["num"], 4);
  EXPECT_EQ(j["per_class"][0]["exact"]["f1"]["den"], 5);
  EXPECT_EQ(j["document_failures"][0]["doc_id"], "d0");
}

TEST(JsonTest, SummaryRoundTripIsLossless) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = oracle::random_sample(rng);
    const auto r = evaluate(s.corpus, s.preds);
    const auto direct = summarize(r, "x");
    const auto parsed = Json::parse(to_json(r, "x").dump());
    const auto back = summary_from_json(parsed, "x.json");
    EXPECT_EQ(back.name, direct.name);
    EXPECT_EQ(back.f1, direct.f1);
    EXPECT_EQ(back.dip, direct.dip);
  }
}

TEST(JsonTest, SummarySchemaErrors) {
  EXPECT_THROW(summary_from_json(Json::array(), "r"), FormatError);
  EXPECT_THROW(summary_from_json(Json{{"dip", 0.5}}, "r"), FormatError);
  EXPECT_THROW(summary_from_json(Json{{"per_class", Json::array()}}, "r"), FormatError);
  EXPECT_THROW(summary_from_json(Json::parse(R"({"per_class":[{"class":"A"}],"dip":1})"), "r"), FormatError);
  EXPECT_NO_THROW(summary_from_json(Json::parse(R"({"per_class":[{"class":"A","f1":1}],"dip":1})"), "r"));
}

TEST(CompareTest, DeltaIsSecondMinusFirst) {
  const auto c = compare(summary("s1", {{"A", 0.9}, {"B", 0.8}}, 0.796),
                         summary("s2", {{"A", 0.7}, {"B", 0.8}}, 0.225));
  const auto text = render_comparison(c);
  EXPECT_NE(text.find("Scenario"), std::string::npos);
  const auto delta = text.substr(text.find("delta"));
  EXPECT_NE(delta.find("-0.200"), std::string::npos);
  EXPECT_NE(delta.find("0.000"), std::string::npos);
  EXPECT_NE(delta.find("-0.571"), std::string::npos);
  EXPECT_EQ(render_comparison_csv(c),
            "scenario,A,B,DIP\n"
            "s1,0.900,0.800,0.796\n"
            "s2,0.700,0.800,0.225\n"
            "delta,-0.200,0.000,-0.571\n");
  const auto j = comparison_to_json(c);
  EXPECT_NEAR(j["dip"]["delta"].get<double>(), -0.571, 1e-12);
}

TEST(CompareTest, IdenticalReportsHaveZeroDeltas) {
  const auto s = summarize(small_report(), "same");
  const auto csv = render_comparison_csv(compare(s, s));
  EXPECT_EQ(csv.substr(csv.find("delta")), "delta,0.000,0.000,0.000\n");
}

TEST(CompareTest, MissingClassNamesReport) {
  try {
    compare(summary("s1", {{"A", 1}, {"B", 1}}, 1), summary("s2", {{"A", 1}}, 1));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(std::string(e.what()), "class 'B' missing from report 's2'");
  }
  EXPECT_THROW(compare(summary("s1", {{"A", 1}, {"B", 1}}, 1), summary("s2", {{"B", 1}, {"A", 1}}, 1)),
               ValidationError);
}

}  // namespace
}  // namespace dip::report
