#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "lscp/eval.hpp"
#include "oracles.hpp"

using namespace lscp;
using namespace lscp::eval;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("ROC-AUC examples") {
  CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.9, 0.8}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.1, 0.2}, std::vector<int>{0, 0, 1, 1}) == 0.0);
  CHECK(roc_auc(std::vector<double>{1, 1, 1, 1}, std::vector<int>{0, 1, 0, 1}) == 0.5);
  CHECK(roc_auc(std::vector<double>{0.1, 0.5, 0.5, 0.9}, std::vector<int>{0, 1, 0, 1}) == 0.875);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{0, 0}), Error);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{0}), Error);
}

TEST_CASE("average precision examples") {
  CHECK(average_precision(std::vector<double>{0.9, 0.8, 0.1}, std::vector<int>{1, 1, 0}) == 1.0);
  // Ranking: idx1 (0), idx0 (1), idx2 (1): precisions 1/2 and 2/3.
  CHECK(average_precision(std::vector<double>{0.5, 0.9, 0.1}, std::vector<int>{1, 0, 1}) ==
        doctest::Approx((0.5 + 2.0 / 3.0) / 2.0));
  // Ties keep index order, so the later positive ranks second.
  CHECK(average_precision(std::vector<double>{1, 1}, std::vector<int>{0, 1}) == 0.5);
  CHECK(average_precision(std::vector<double>{1, 1}, std::vector<int>{1, 0}) == 1.0);
}

TEST_CASE("ROC-AUC and AP match direct definitions on 1000 random cases") {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 1000; ++c) {
    const Index n = 2 + rng() % 80;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (Index i = 0; i < n; ++i) {
      // A small value range forces frequent ties.
      s[i] = c % 2 ? static_cast<double>(rng() % 5) : std::ldexp(static_cast<double>(rng() >> 11), -53);
      y[i] = rng() % 4 == 0;
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(std::abs(roc_auc(s, y) - oracle::auc(s, y)) <= 1e-9);
    CHECK(std::abs(average_precision(s, y) - oracle::average_precision(s, y)) <= 1e-9);
  }
}

TEST_CASE("metrics are invariant to strictly increasing transforms") {
  auto s = oracle::random_points(1, 60, 3)[0];
  std::vector<int> y(60, 0);
  for (Index i = 0; i < 60; i += 7) y[i] = 1;
  std::vector<double> t(s);
  for (double& x : t) x = std::exp(2.0 * x) + 5.0;
  CHECK(roc_auc(s, y) == roc_auc(t, y));
  CHECK(average_precision(s, y) == average_precision(t, y));
}

TEST_CASE("published tables reproduce the reported Friedman statistics") {
  auto roc = read_perf_csv(slurp(LSCP_FIXTURE_DIR "/published_roc_auc.csv"));
  CHECK(roc.datasets.size() == 20);
  CHECK(roc.algorithms.size() == 11);
  auto r = friedman(roc);
  CHECK(r.dof == 10);
  CHECK(std::abs(r.chi2 - 43.34) / 43.34 <= 0.01);
  CHECK(std::abs(r.p - 4.316e-6) / 4.316e-6 <= 0.01);

  auto map = read_perf_csv(slurp(LSCP_FIXTURE_DIR "/published_map.csv"));
  auto m = friedman(map);
  CHECK(std::abs(m.chi2 - 43.49) / 43.49 <= 0.01);
  CHECK(std::abs(m.p - 4.063e-6) / 4.063e-6 <= 0.01);

  double sum = 0;
  for (double x : r.mean_ranks) sum += x;
  CHECK(sum == doctest::Approx(11.0 * 12.0 / 2.0));
}

TEST_CASE("Friedman degenerate and hand cases") {
  PerfMatrix same{{"a", "b", "c"}, {"x", "y"}, Matrix{{0.5, 0.5}, {0.7, 0.7}, {0.1, 0.1}}};
  auto r = friedman(same);
  CHECK(r.chi2 == 0.0);
  CHECK(r.p == 1.0);
  CHECK(r.mean_ranks == std::vector<double>{1.5, 1.5});

  // Algorithm y always wins: ranks x=2, y=1 on 4 datasets.
  // chi2 = 12N/(k(k+1)) * sum(R_j^2) - 3N(k+1) = 8 * 5 - 36 = 4.
  PerfMatrix win{{"a", "b", "c", "d"}, {"x", "y"},
                 Matrix{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.9}, {0.0, 0.1}}};
  auto w = friedman(win);
  CHECK(w.chi2 == doctest::Approx(4.0));
  CHECK(w.p == doctest::Approx(oracle::gamma_q(0.5, 2.0)).epsilon(1e-12));
  CHECK(w.mean_ranks == std::vector<double>{2.0, 1.0});

  PerfMatrix tiny{{"a"}, {"x", "y"}, Matrix{{0.1, 0.2}}};
  CHECK_THROWS_AS(friedman(tiny), Error);
  PerfMatrix nan{{"a", "b"}, {"x", "y"}, Matrix{{0.1, NAN}, {0.2, 0.3}}};
  CHECK_THROWS_AS(friedman(nan), Error);
}

TEST_CASE("performance CSV parsing") {
  auto p = read_perf_csv("dataset,A,B,best\n# comment\nd1,0.5,0.6,B\nd2,0.7,0.1,A\n");
  CHECK(p.algorithms == std::vector<std::string>{"A", "B"});
  CHECK(p.datasets == std::vector<std::string>{"d1", "d2"});
  CHECK(p.values(1, 0) == 0.7);
  CHECK_THROWS_AS(read_perf_csv("dataset,A,B\nd1,0.5\n"), Error);
  CHECK_THROWS_AS(read_perf_csv("dataset,A,B\nd1,0.5,zz\n"), Error);
}

TEST_CASE("chi-square survival matches the incomplete gamma oracle") {
  for (int dof = 1; dof <= 30; ++dof) {
    for (double x = 0.0; x <= 100.0; x += 0.37) {
      const double want = oracle::gamma_q(dof / 2.0, x / 2.0);
      const double got = chi2_sf(x, dof);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(1e-300, want) + 1e-300);
    }
  }
  CHECK(chi2_sf(0.0, 3) == 1.0);
  CHECK(chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("Nemenyi critical difference") {
  CHECK(nemenyi_q(2, 0.05) == doctest::Approx(1.960).epsilon(1e-3));
  CHECK(nemenyi_q(11, 0.05) == doctest::Approx(3.219).epsilon(1e-3));
  CHECK(nemenyi_q(11, 0.10) == doctest::Approx(2.978).epsilon(1e-3));
  CHECK(nemenyi_cd(11, 20) == doctest::Approx(nemenyi_q(11, 0.05) * std::sqrt(11.0 * 12.0 / 120.0)));
  CHECK(nemenyi_cd(11, 20) == doctest::Approx(3.3762).epsilon(1e-3));
  CHECK_THROWS_AS(nemenyi_q(1, 0.05), Error);
  CHECK_THROWS_AS(nemenyi_q(21, 0.05), Error);
  CHECK_THROWS_AS(nemenyi_q(5, 0.01), Error);
}
