// Copyright 2026 The Driftlock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "driftlock/cli/config.hpp"
#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/exact_sum.hpp"
#include "driftlock/rng.hpp"
#include "driftlock/units.hpp"

namespace dl = driftlock;
using dl::Dimension;
using dl::cli::Config;
using dl::cli::Range;

namespace {

std::string error_of(auto &&fn) {
    try {
        fn();
    } catch (const dl::ConfigError &e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Units, ParsesCommonForms) {
    EXPECT_DOUBLE_EQ(dl::parse_quantity("2 MHz", Dimension::frequency, "f"), 2e6);
    EXPECT_DOUBLE_EQ(dl::parse_quantity("40ns", Dimension::time, "t"), 40e-9);
    EXPECT_DOUBLE_EQ(dl::parse_quantity("1/300 Hz", Dimension::frequency, "f"), 1.0 / 300.0);
    EXPECT_DOUBLE_EQ(dl::parse_quantity("0.00296 MHz^2/Hz", Dimension::frequency_psd, "A"), 2.96e9);
    EXPECT_DOUBLE_EQ(dl::parse_quantity("-6 mV", Dimension::voltage, "eps"), -6.0);
    EXPECT_DOUBLE_EQ(dl::parse_quantity("24 ms", Dimension::time, "t"), 0.024);
    EXPECT_NEAR(dl::parse_quantity("180 deg", Dimension::angle, "th"), 3.141592653589793, 1e-15);
}

TEST(Units, BareNumberNamesTheField) {
    const std::string msg = error_of([] { dl::parse_quantity("2", Dimension::frequency, "feedback.f_target"); });
    EXPECT_NE(msg.find("feedback.f_target"), std::string::npos) << msg;
    EXPECT_NE(msg.find("missing unit"), std::string::npos) << msg;
}

TEST(Units, WrongDimensionRejected) {
    const std::string msg = error_of([] { dl::parse_quantity("3 ms", Dimension::frequency, "x"); });
    EXPECT_NE(msg.find("not a frequency unit"), std::string::npos) << msg;
    EXPECT_THROW(dl::parse_quantity("1/0 Hz", Dimension::frequency, "x"), dl::ConfigError);
    EXPECT_THROW(dl::parse_number("abc", "x"), dl::ConfigError);
    EXPECT_DOUBLE_EQ(dl::parse_number("1/4", "x"), 0.25);
}

TEST(Config, KeyValueAndJsonAgree) {
    Config a = Config::parse("# comment\nfeedback.f_target = 2 MHz\nspectrum.exponent_beta: 1.34\nseed = 7\n", "a.conf");
    Config b = Config::parse(R"({"feedback.f_target": "2 MHz", "spectrum.exponent_beta": 1.34, "seed": 7})", "b.json");
    for (Config *c : {&a, &b}) {
        EXPECT_DOUBLE_EQ(c->quantity("feedback.f_target", Dimension::frequency), 2e6);
        EXPECT_DOUBLE_EQ(c->number("spectrum.exponent_beta"), 1.34);
        EXPECT_EQ(c->seed("seed"), 7u);
        EXPECT_NO_THROW(c->reject_unknown("test"));
    }
}

TEST(Config, MissingUnitNamesKeyAndLine) {
    Config c = Config::parse("seed = 1\nfeedback.f_target = 2\n", "run.conf");
    const std::string msg = error_of([&] { c.quantity("feedback.f_target", Dimension::frequency); });
    EXPECT_NE(msg.find("feedback.f_target"), std::string::npos) << msg;
    EXPECT_NE(msg.find("run.conf:2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("missing unit"), std::string::npos) << msg;
}

TEST(Config, RangeViolationNamesInvariant) {
    Config c = Config::parse("noise.exponent_beta = -1\n", "n.conf");
    const std::string msg = error_of([&] { c.number("noise.exponent_beta", std::nullopt, Range::closed(0.0, 3.0)); });
    EXPECT_NE(msg.find("noise.exponent_beta"), std::string::npos) << msg;
    EXPECT_NE(msg.find("range invariant"), std::string::npos) << msg;

    Config d = Config::parse("t = 0 s\n", "d.conf");
    EXPECT_THROW(d.quantity("t", Dimension::time, std::nullopt, Range::positive()), dl::ConfigError);
}

TEST(Config, UnknownKeysListed) {
    Config c = Config::parse("seed = 1\nfoo = 2\nbar.baz = 3 Hz\n", "u.conf");
    c.seed("seed");
    const std::string msg = error_of([&] { c.reject_unknown("predict-t2"); });
    EXPECT_NE(msg.find("foo"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bar.baz"), std::string::npos) << msg;
    EXPECT_NE(msg.find("predict-t2"), std::string::npos) << msg;
}

TEST(Config, ParseErrorsCarryLocation) {
    EXPECT_NE(error_of([] { Config::parse("seed = 1\nthis line is junk\n", "p.conf"); }).find("p.conf:2"),
              std::string::npos);
    EXPECT_NE(error_of([] { Config::parse("a = 1\na = 2\n", "p.conf"); }).find("duplicate"), std::string::npos);
    EXPECT_NE(error_of([] { Config::parse(R"({"a": {"b": 1}})", "p.json"); }).find("flat"), std::string::npos);
    EXPECT_NE(error_of([] { Config::parse("{\"a\": ", "p.json"); }).find("JSON parse error"), std::string::npos);
}

TEST(Config, SeedIsMandatory) {
    Config c = Config::parse("scenario = predict-t2\n", "s.conf");
    const std::string msg = error_of([&] { c.seed("seed"); });
    EXPECT_NE(msg.find("seed"), std::string::npos) << msg;
    Config bad = Config::parse("seed = -3\n", "s.conf");
    EXPECT_THROW(bad.seed("seed"), dl::ConfigError);
}

TEST(Config, OverridesAndDefaults) {
    Config c = Config::parse("seed = 1\n", "o.conf");
    EXPECT_THROW(c.set("seed", "2", "o.conf:9"), dl::ConfigError);
    c.set("seed", "2", "command-line override");
    EXPECT_EQ(c.seed("seed"), 2u);
    EXPECT_DOUBLE_EQ(c.quantity("x", Dimension::time, 0.5), 0.5);
    EXPECT_FALSE(c.optional_quantity("y", Dimension::time).has_value());
    EXPECT_TRUE(c.boolean("z", true));
    EXPECT_EQ(c.choice("mode", {"a", "b"}, "b"), "b");
    ASSERT_EQ(c.resolved().size(), 5u);
    EXPECT_EQ(c.resolved()[2].second, "auto");
}

TEST(Config, ListsAndChoices) {
    Config c = Config::parse("a = 2.96e9 Hz^2/Hz, 1.75e9 Hz^2/Hz\nb = 1.34, 1.17\nm = sideways\n", "l.conf");
    const auto a = c.quantity_list("a", Dimension::frequency_psd);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_DOUBLE_EQ(a[1], 1.75e9);
    const auto b = c.number_list("b");
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[0], 1.34);
    EXPECT_THROW(c.choice("m", {"both", "closed", "open"}), dl::ConfigError);
}

TEST(ExactSum, OrderIndependent) {
    dl::Rng rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> xs;
    for (int i = 0; i < 5000; ++i) xs.push_back(u(rng) * std::pow(10.0, (i % 17) - 8));
    dl::ExactSum fwd, rev, left, right;
    for (double x : xs) fwd.add(x);
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.add(*it);
    for (size_t i = 0; i < xs.size(); ++i) (i % 3 ? left : right).add(xs[i]);
    left.merge(right);
    EXPECT_EQ(fwd.value(), rev.value());
    EXPECT_EQ(fwd.value(), left.value());
    dl::ExactSum cancel;
    cancel.add(1e100);
    cancel.add(1.0);
    cancel.add(-1e100);
    EXPECT_EQ(cancel.value(), 1.0);
}

TEST(Csv, RoundTripAndColumns) {
    dl::CsvWriter w{"a", "b"};
    w.row({0.1, 1e-300});
    w.row({-2.5, 3.0});
    const auto t = dl::parse_csv(w.text(), "mem");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(std::stod(t.rows[0][0]), 0.1);
    EXPECT_EQ(std::stod(t.rows[0][1]), 1e-300);
    EXPECT_EQ(t.column("b"), 1u);
    EXPECT_THROW(t.column("c"), dl::ConfigError);
    EXPECT_EQ(dl::format_double(0.1), "0.1");
}

TEST(Rng, StreamsAreIndependentOfCreationOrder) {
    dl::Rng a = dl::stream_rng(5, 1), b = dl::stream_rng(5, 2);
    const auto a1 = a();
    dl::Rng b2 = dl::stream_rng(5, 2), a2 = dl::stream_rng(5, 1);
    EXPECT_EQ(a1, a2());
    EXPECT_EQ(b(), b2());
    EXPECT_NE(dl::stream_rng(5, 1)(), dl::stream_rng(6, 1)());
}
