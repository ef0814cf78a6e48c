#include <gtest/gtest.h>

#include <sstream>

#include "boxlab/csv.hpp"
#include "boxlab/json_io.hpp"

using namespace boxlab;
using boxlab::io::json;

TEST(Json, CorrelationRoundTripExact) {
  auto pr = pr_box<Rational>();
  auto j = io::correlation_to_json(pr);
  ASSERT_EQ(j.size(), 16u);
  EXPECT_EQ(j[0], "1/2");
  EXPECT_EQ(io::correlation_from_json<Rational>(j), pr);
}

TEST(Json, CorrelationRoundTripFloat) {
  auto w = white_noise<double>();
  EXPECT_EQ(io::correlation_from_json<double>(io::correlation_to_json(w)), w);
}

TEST(Json, DecimalInputIsExactInRationalMode) {
  json j = json::array();
  for (int i = 0; i < 16; ++i) j.push_back(0.25);
  EXPECT_EQ(io::correlation_from_json<Rational>(j), white_noise<Rational>());
}

TEST(Json, BoxObjects) {
  auto b = DeterministicBox::one_bit(5);
  auto j = io::box_to_json(b);
  EXPECT_EQ(j.at("kind"), "1bit");
  EXPECT_EQ(j.at("j"), 5);
  EXPECT_EQ(io::box_from_json(j), b);
  EXPECT_THROW(io::box_from_json(json{{"kind", "2bit"}, {"j", 0}}), InvalidArgument);
}

TEST(Json, NamedBoxes) {
  EXPECT_EQ(io::named_correlation<Rational>("pr"), pr_box<Rational>());
  EXPECT_EQ(io::named_correlation<Rational>("0bit:3"), as_correlation<Rational>(DeterministicBox::zero_bit(3)));
  EXPECT_THROW(io::named_correlation<Rational>("nope"), InvalidArgument);
}

TEST(Json, RejectsMalformedCorrelations) {
  EXPECT_THROW(io::correlation_from_json<Rational>(json::array({1, 0})), InvalidArgument);
  json bad = json::array();
  for (int i = 0; i < 16; ++i) bad.push_back(i == 0 ? 1.0 : 0.0);
  EXPECT_THROW(io::correlation_from_json<Rational>(bad), InvalidArgument);
}

TEST(Json, ContentHashIsKeyOrderIndependent) {
  json a = json::parse(R"({"b": 1, "a": [1, 2]})");
  json b = json::parse(R"({"a": [1, 2], "b": 1})");
  EXPECT_EQ(io::content_hash(a), io::content_hash(b));
  EXPECT_NE(io::content_hash(a), io::content_hash(json::parse(R"({"a": [1, 2], "b": 2})")));
  EXPECT_EQ(io::content_hash(a).size(), 16u);
}

TEST(Csv, LayoutAndLineEndings) {
  std::ostringstream os;
  io::CsvWriter w(os);
  w.comment("seed", "7");
  w.header({"a", "b"});
  w.row({io::cell(0.5), io::cell(Rational(1, 3))});
  EXPECT_EQ(os.str(), "# seed: 7\na,b\n0.5,1/3\n");
}
