#include <doctest.h>

#include <random>
#include <set>

#include "lscp/neighbors.hpp"
#include "test_util.hpp"

using namespace lscp;

TEST_CASE("1-D nearest neighbor") {
  Matrix pts{{0.0}, {1.0}, {3.0}};
  std::vector<double> q{0.9};
  NeighborList nb = knn(pts, q, 1);
  REQUIRE(nb.size() == 1);
  CHECK(nb.indices[0] == 1);
  CHECK(nb.distances[0] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("k = n returns every point sorted by distance") {
  Matrix pts{{5.0}, {-1.0}, {2.0}, {0.5}};
  std::vector<double> q{0.0};
  NeighborList nb = knn(pts, q, 4);
  CHECK(nb.indices == std::vector<Index>{3, 1, 2, 0});
  CHECK(std::is_sorted(nb.distances.begin(), nb.distances.end()));
}

TEST_CASE("ties at the k-th distance are all included, in index order") {
  Matrix pts{{1.0}, {-1.0}, {2.0}, {-2.0}, {0.0}};
  std::vector<double> q{0.0};
  NeighborList nb = knn(pts, q, 2);
  CHECK(nb.indices == std::vector<Index>{4, 0, 1});
  nb = knn(pts, q, 4);
  CHECK(nb.indices == std::vector<Index>{4, 0, 1, 2, 3});
}

TEST_CASE("self exclusion and contract errors") {
  Matrix pts{{0.0}, {1.0}, {3.0}};
  std::vector<double> q{1.0};
  NeighborList nb = knn(pts, q, 1, std::nullopt, Index{1});
  CHECK(nb.indices == std::vector<Index>{0});
  CHECK_THROWS_AS(knn(pts, q, 3, std::nullopt, Index{1}), Error);
  CHECK_THROWS_AS(knn(pts, q, 4), Error);
  CHECK_THROWS_AS(knn(pts, q, 0), Error);
  std::vector<Index> none;
  CHECK_THROWS_AS(knn(pts, q, 1, std::span<const Index>(none)), Error);
  std::vector<Index> bad{3};
  CHECK_THROWS_AS(knn(pts, q, 1, std::span<const Index>(bad)), Error);
  std::vector<double> q2{1.0, 2.0};
  CHECK_THROWS_AS(knn(pts, q2, 1), Error);
}

TEST_CASE("50 random 2-D points, k=5, match the O(n^2) oracle") {
  auto pts = oracle::random_points(50, 2, 7);
  Matrix m = testutil::to_matrix(pts);
  for (Index i = 0; i < 50; ++i) {
    NeighborList nb = knn(m, m.row(i), 5, std::nullopt, i);
    auto expect = oracle::knn(pts, pts[i], 5, {}, static_cast<long>(i));
    REQUIRE(nb.size() == expect.size());
    for (Index j = 0; j < nb.size(); ++j) {
      CHECK(nb.indices[j] == expect[j].index);
      CHECK(nb.squared[j] == expect[j].d2);
    }
  }
}

TEST_CASE("property: knn equals brute force on random instances up to n=200") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 2 + rng() % 199;
    const Index d = 1 + rng() % 6;
    const Index k = 1 + rng() % n;
    // Coarse grid coordinates produce many exact ties.
    oracle::Points pts(n, std::vector<double>(d));
    for (auto& r : pts) {
      for (double& v : r) v = static_cast<double>(rng() % 7);
    }
    std::vector<double> q(d);
    for (double& v : q) v = static_cast<double>(rng() % 7) + 0.5 * static_cast<double>(rng() % 2);
    std::vector<Index> features;
    for (Index f = 0; f < d; ++f) {
      if (rng() % 2) features.push_back(f);
    }
    Matrix m = testutil::to_matrix(pts);
    NeighborList nb = features.empty() ? knn(m, q, k)
                                       : knn(m, q, k, std::span<const Index>(features));
    auto expect = oracle::knn(pts, q, k, features);
    REQUIRE(nb.size() == expect.size());
    for (Index j = 0; j < nb.size(); ++j) {
      CHECK(nb.indices[j] == expect[j].index);
      CHECK(nb.squared[j] == expect[j].d2);
    }
  }
}

TEST_CASE("projection onto all features equals the unprojected query") {
  Matrix m = testutil::random_matrix(80, 4, 3);
  std::vector<Index> all{0, 1, 2, 3};
  for (Index i = 0; i < 10; ++i) {
    CHECK(knn(m, m.row(i), 7, std::span<const Index>(all), i) == knn(m, m.row(i), 7, std::nullopt, i));
  }
}

TEST_CASE("truncate of a deep list equals a direct query") {
  Matrix m = testutil::random_matrix(60, 3, 5);
  std::vector<double> q{0.1, -0.2, 0.3};
  NeighborList deep = knn(m, q, 40);
  for (Index k : {1, 5, 17, 40}) CHECK(truncate(deep, k) == knn(m, q, k));
  CHECK_THROWS_AS(truncate(deep, 41), Error);
}

TEST_CASE("self and query tables: serial and parallel agree bit for bit") {
  Matrix m = testutil::random_matrix(120, 5, 8);
  Matrix q = testutil::random_matrix(40, 5, 9);
  CHECK(self_knn_table(m, 9, Exec::serial) == self_knn_table(m, 9, Exec::parallel));
  CHECK(query_knn_table(m, q, 9, Exec::serial) == query_knn_table(m, q, 9, Exec::parallel));
  auto table = self_knn_table(m, 9, Exec::serial);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j : table[i].indices) CHECK(j != i);
  }
}
