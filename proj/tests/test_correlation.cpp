// Copyright 2026 The tdc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "tdc/correlation.hpp"
#include "tdc/format.hpp"

using namespace tdc;

namespace {

Measurement make(std::string layer, Method method, double f, std::uint64_t seed, double a,
                 double p) {
  Measurement m;
  m.hypothesis = {std::move(layer), method, f, seed};
  ErrorReport r;
  r.weight = {a, a, a};
  r.n_w = 1;
  m.errors = r;
  m.p = p;
  return m;
}

// 5 layers x 3 methods x 3 fractions x runs, random error and performance.
std::vector<Measurement> random_grid(int runs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> die(0, 9);
  std::vector<Measurement> ms;
  const Method methods[] = {Method::cp, Method::tucker, Method::tt};
  for (int r = 0; r < runs; ++r)
    for (int l = 0; l < 5; ++l)
      for (auto method : methods)
        for (double f : {0.1, 0.5, 0.9})
          ms.push_back(make("conv" + std::to_string(2 * l + 2), method, f,
                            static_cast<std::uint64_t>(r), die(rng), die(rng) / 10.0));
  return ms;
}

// Regroups by brute force and returns per-run tau for each summary label.
std::map<std::string, std::vector<double>> regroup(const std::vector<Measurement>& ms,
                                                   Grouping g) {
  std::map<std::string, std::vector<double>> out;
  std::map<std::uint64_t, std::vector<const Measurement*>> runs;
  for (const auto& m : ms) runs[m.hypothesis.seed].push_back(&m);
  auto tau_of = [](const std::vector<const Measurement*>& sel) {
    std::vector<double> a, p;
    for (auto* m : sel) {
      a.push_back(m->errors->weight.relative);
      p.push_back(*m->p);
    }
    return oracle::kendall_brute(a, p);
  };
  for (const auto& [run, all] : runs) {
    if (g == Grouping::all) {
      out["all"].push_back(tau_of(all));
    } else if (g == Grouping::by_compression) {
      std::map<double, std::vector<const Measurement*>> by_f;
      for (auto* m : all) by_f[m->hypothesis.retained_fraction].push_back(m);
      for (const auto& [f, sel] : by_f)
        out["retained_fraction=" + format_double(f)].push_back(tau_of(sel));
    } else {
      std::map<std::pair<std::string, double>, std::vector<const Measurement*>> slices;
      for (auto* m : all) {
        const auto& h = m->hypothesis;
        std::string key = g == Grouping::layers_only ? std::string(to_string(h.method))
                                                     : h.layer_id;
        slices[{key, h.retained_fraction}].push_back(m);
      }
      double sum = 0.0;
      for (const auto& [k, sel] : slices) sum += tau_of(sel);
      out[std::string(to_string(g))].push_back(sum / static_cast<double>(slices.size()));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("kendall extremes and hand example") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> up{0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> down{0.5, 0.4, 0.3, 0.2, 0.1};
  CHECK(kendall_tau(a, up) == 1.0);
  CHECK(kendall_tau(a, down) == -1.0);

  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 2, 4, 3};
  const auto c = kendall_counts(x, y);
  CHECK(c.concordant == 5);
  CHECK(c.discordant == 1);
  CHECK(c.total == 6);
  CHECK(kendall_tau(x, y) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ties count as neither") {
  const std::vector<double> a{1, 1, 2};
  const std::vector<double> p{1, 2, 2};
  const auto c = kendall_counts(a, p);
  CHECK(c.concordant == 1);
  CHECK(c.discordant == 0);
  CHECK(c.total == 3);
  CHECK(kendall_tau(std::vector<double>{3, 3, 3}, std::vector<double>{1, 2, 3}) == 0.0);
}

TEST_CASE("kendall rejects bad input") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{1, 2};
  const std::vector<double> one{1};
  CHECK_THROWS_AS(kendall_tau(a, b), std::invalid_argument);
  CHECK_THROWS_AS(kendall_tau(one, one), std::invalid_argument);
  CHECK_THROWS_AS(kendall_tau(std::vector<double>{}, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("kendall matches brute force on random sequences with ties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng() % 40;
    std::vector<double> a(m), p(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = static_cast<double>(rng() % 7);
      p[i] = static_cast<double>(rng() % 7);
    }
    const auto c = kendall_counts(a, p);
    const auto r = oracle::kendall_pairs(a, p);
    REQUIRE(static_cast<long>(c.concordant) == r.concordant);
    REQUIRE(static_cast<long>(c.discordant) == r.discordant);
    REQUIRE(static_cast<long>(c.total) == r.total);
    REQUIRE(kendall_tau(a, p) == oracle::kendall_brute(a, p));
  }
}

TEST_CASE("kendall is invariant under increasing transforms") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(30), p(30), a2(30), p2(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = u(rng);
    p[i] = u(rng);
    a2[i] = std::exp(3.0 * a[i]) - 7.0;
    p2[i] = std::pow(p[i], 3.0);
  }
  CHECK(kendall_tau(a, p) == kendall_tau(a2, p2));
}

TEST_CASE("grouping names round trip") {
  for (auto g : kAllGroupings) CHECK(parse_grouping(to_string(g)) == g);
  CHECK(to_string(Grouping::by_compression) == "by_compression");
  CHECK_THROWS(parse_grouping("by_layer"));
}

TEST_CASE("monotone construction gives mean one in every grouping") {
  std::vector<Measurement> ms;
  const Method methods[] = {Method::cp, Method::tucker, Method::tt};
  int k = 0;
  for (std::uint64_t run = 0; run < 3; ++run)
    for (int l = 0; l < 4; ++l)
      for (auto method : methods)
        for (double f : {0.25, 0.75}) {
          const double a = 1.0 + k++;
          ms.push_back(make("conv" + std::to_string(l), method, f, run, a, a / (1.0 + a)));
        }
  for (auto g : kAllGroupings) {
    const auto r = grouped_tau(ms, ErrorKey::weight_relative, PerfKey::p, g);
    REQUIRE(!r.summaries.empty());
    for (const auto& s : r.summaries) {
      CHECK(s.runs.size() == 3);
      CHECK(s.mean_tau == 1.0);
      CHECK(s.std_tau == 0.0);
    }
    CHECK(r.skipped.empty());
  }
}

TEST_CASE("grouped tau matches brute-force regrouping") {
  const auto ms = random_grid(4, 99);
  for (auto g : kAllGroupings) {
    const auto r = grouped_tau(ms, ErrorKey::weight_relative, PerfKey::p, g);
    const auto ref = regroup(ms, g);
    REQUIRE(r.summaries.size() == ref.size());
    for (const auto& s : r.summaries) {
      INFO(s.label);
      REQUIRE(ref.count(s.label) == 1);
      const auto& taus = ref.at(s.label);
      REQUIRE(s.per_run_taus.size() == taus.size());
      double mean = 0.0;
      for (std::size_t i = 0; i < taus.size(); ++i) {
        CHECK(std::abs(s.per_run_taus[i] - taus[i]) <= 1e-12);
        mean += taus[i];
      }
      mean /= static_cast<double>(taus.size());
      double ss = 0.0;
      for (double t : taus) ss += (t - mean) * (t - mean);
      CHECK(std::abs(s.mean_tau - mean) <= 1e-12);
      CHECK(std::abs(s.std_tau - std::sqrt(ss / static_cast<double>(taus.size()))) <= 1e-12);
    }
  }
}

TEST_CASE("slices below two members are skipped") {
  std::vector<Measurement> ms;
  ms.push_back(make("conv2", Method::cp, 0.5, 0, 1.0, 0.9));
  ms.push_back(make("conv4", Method::cp, 0.5, 0, 2.0, 0.8));
  ms.push_back(make("conv2", Method::tt, 0.5, 0, 3.0, 0.7));
  ms.push_back(make("conv2", Method::cp, 0.9, 0, 4.0, 0.6));

  const auto layers = grouped_tau(ms, ErrorKey::weight_relative, PerfKey::p,
                                  Grouping::layers_only);
  REQUIRE(layers.summaries.size() == 1);
  CHECK(layers.summaries[0].slices.size() == 1);
  CHECK(layers.summaries[0].per_run_taus == std::vector<double>{-1.0});
  CHECK(layers.skipped.size() == 2);

  auto missing = ms;
  missing[0].p.reset();
  missing[1].ok = false;
  const auto all = grouped_tau(missing, ErrorKey::weight_relative, PerfKey::p, Grouping::all);
  CHECK(all.summaries[0].slices.at(0).count == 2);

  const auto none = grouped_tau(missing, ErrorKey::feature_relative, PerfKey::p,
                                Grouping::all);
  CHECK(none.summaries.size() == 1);
  CHECK(none.summaries[0].runs.empty());
  CHECK(std::isnan(none.summaries[0].mean_tau));
}
