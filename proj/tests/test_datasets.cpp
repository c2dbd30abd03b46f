#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "lscp/datasets.hpp"
#include "test_util.hpp"

using namespace lscp;

TEST_CASE("load a small labeled CSV") {
  Dataset ds = parse_csv("f1,f2,label\n0,0,0\n1,0,0\n0,1,0\n9,9,1\n", "tiny");
  CHECK(ds.size() == 4);
  CHECK(ds.dims() == 2);
  CHECK(ds.outlier_count() == 1);
  CHECK(ds.features(3, 1) == 9.0);
  CHECK(ds.labels == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("CSV errors carry their location") {
  CHECK_THROWS_WITH_AS(parse_csv("a,label\n1,0\n3,2\n", "bad"),
                       doctest::Contains("label domain violation"), Error);
  CHECK_THROWS_WITH_AS(parse_csv("a,b,label\n1,2,0\n1,x,0\n", "bad"),
                       doctest::Contains("bad:3:2"), Error);
  CHECK_THROWS_WITH_AS(parse_csv("a,b,label\n1,2,0\n1,2\n", "bad"),
                       doctest::Contains("expected 3 columns"), Error);
  CHECK_THROWS_AS(parse_csv("a,label\nnan,0\n1,1\n", "bad"), Error);
  CHECK_THROWS_AS(parse_csv("a,label\ninf,0\n1,1\n", "bad"), Error);
  CHECK_THROWS_WITH_AS(load_csv("/nonexistent/dir/file.csv"), doctest::Contains("cannot open"),
                       Error);
}

TEST_CASE("CSV file round trip keeps values exactly") {
  Dataset ds = testutil::blob_dataset(30, 4, 3, 11);
  auto path = std::filesystem::temp_directory_path() / "lscp_roundtrip.csv";
  write_csv(ds, path);
  Dataset back = load_csv(path);
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);
  CHECK(back.name == "lscp_roundtrip");
  std::filesystem::remove(path);
}

TEST_CASE("validate enforces both classes for benchmark use") {
  Dataset ds = parse_csv("a,label\n1,0\n2,0\n", "one_class");
  CHECK_NOTHROW(ds.validate(false));
  CHECK_THROWS_AS(ds.validate(true), Error);
}

TEST_CASE("train size rounds half up") {
  CHECK(train_size(683, 0.6) == 410);  // 409.8
  CHECK(train_size(10, 0.6) == 6);
  CHECK(train_size(5, 0.5) == 3);      // 2.5
  CHECK(train_size(7, 0.5) == 4);      // 3.5
}

TEST_CASE("stratified split keeps class proportions") {
  Dataset ds = testutil::blob_dataset(8, 2, 2, 3);
  Split s = split(ds, 0.6, 42, true);
  CHECK(s.train.size() == 6);
  CHECK(s.test.size() == 4);
  auto outliers_in = [&](const std::vector<Index>& idx) {
    return std::count_if(idx.begin(), idx.end(), [&](Index i) { return ds.labels[i] == 1; });
  };
  CHECK(outliers_in(s.train) == 1);
  CHECK(outliers_in(s.test) == 1);
  CHECK(split(ds, 0.6, 42, true) == s);
}

TEST_CASE("breastw-sized split: 683 rows give 410/273") {
  Dataset ds = testutil::blob_dataset(683 - 239, 239, 2, 5);
  Split s = split(ds, 0.6, 1, true);
  CHECK(s.train.size() == 410);
  CHECK(s.test.size() == 273);
}

TEST_CASE("split is a partition for every seed and fraction") {
  Dataset ds = testutil::blob_dataset(57, 9, 2, 17);
  for (double frac : {0.2, 0.5, 0.6, 0.75, 0.9}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (bool strat : {true, false}) {
        Split s = split(ds, frac, seed, strat);
        std::set<Index> all(s.train.begin(), s.train.end());
        for (Index i : s.test) CHECK(all.insert(i).second);
        CHECK(all.size() == ds.size());
        CHECK(*all.rbegin() == ds.size() - 1);
        CHECK(s.train.size() == train_size(ds.size(), frac));
        if (strat) {
          const double global = 9.0 / 66.0;
          const double local =
              static_cast<double>(std::count_if(s.train.begin(), s.train.end(),
                                                [&](Index i) { return ds.labels[i] == 1; })) /
              static_cast<double>(s.train.size());
          CHECK(std::abs(local - global) <= 1.0 / static_cast<double>(s.train.size()));
        }
      }
    }
  }
}

TEST_CASE("split contract errors") {
  Dataset ds = testutil::blob_dataset(10, 1, 2, 1);
  CHECK_THROWS_AS(split(ds, 0.6, 0, true), Error);  // one outlier only
  CHECK_NOTHROW(split(ds, 0.6, 0, false));
  CHECK_THROWS_AS(split(ds, 0.0, 0, false), Error);
  CHECK_THROWS_AS(split(ds, 1.0, 0, false), Error);
}

TEST_CASE("different seeds give different splits") {
  Dataset ds = testutil::blob_dataset(50, 10, 2, 2);
  CHECK_FALSE(split(ds, 0.6, 1, true) == split(ds, 0.6, 2, true));
}

TEST_CASE("standardize uses reference rows only") {
  Matrix x{{1, 5}, {3, 5}, {100, 7}};
  std::vector<Index> ref{0, 1};
  standardize_features(x, ref);
  CHECK(x(0, 0) == doctest::Approx(-1.0));
  CHECK(x(1, 0) == doctest::Approx(1.0));
  CHECK(x(2, 0) == doctest::Approx(98.0));
  CHECK(x(0, 1) == 0.0);  // constant on the reference rows: centered only
  CHECK(x(2, 1) == 2.0);
}
