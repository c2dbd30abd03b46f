#include "lscp/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace lscp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string location(const std::string& name, std::size_t line, std::size_t col) {
  return name + ":" + std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

Index Dataset::outlier_count() const {
  return static_cast<Index>(std::count(labels.begin(), labels.end(), 1));
}

void Dataset::validate(bool require_both_classes) const {
  if (features.rows() < 2) throw Error(name + ": need at least 2 rows");
  if (features.cols() < 1) throw Error(name + ": need at least 1 feature");
  if (labels.size() != features.rows()) throw Error(name + ": label count mismatch");
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw Error(name + ": non-finite feature value");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(name + ": label domain violation");
  }
  if (require_both_classes) {
    Index p = outlier_count();
    if (p == 0 || p == size()) throw Error(name + ": both classes must be present");
  }
}

Dataset parse_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<double> values;
  std::vector<int> labels;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (width == 0) {
      if (fields.size() < 2) {
        throw Error(location(name, line_no, 1) + ": header needs a feature and a label column");
      }
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      throw Error(location(name, line_no, std::min(fields.size(), width) + 1) +
                  ": expected " + std::to_string(width) + " columns, got " +
                  std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      std::string_view f = fields[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(location(name, line_no, c + 1) + ": cannot parse '" +
                    std::string(f) + "' as a number");
      }
      if (!std::isfinite(v)) {
        throw Error(location(name, line_no, c + 1) + ": non-finite value");
      }
      if (c + 1 == width) {
        if (v != 0.0 && v != 1.0) {
          throw Error(location(name, line_no, c + 1) + ": label domain violation (" +
                      std::string(f) + ")");
        }
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
  }
  if (width == 0) throw Error(name + ": empty file");

  Dataset ds;
  ds.name = name;
  ds.features = Matrix(labels.size(), width - 1, std::move(values));
  ds.labels = std::move(labels);
  ds.validate(false);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.stem().string());
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Index c = 0; c < ds.dims(); ++c) out << "f" << c << ",";
  out << "label\n";
  out << std::setprecision(17);
  for (Index r = 0; r < ds.size(); ++r) {
    for (double v : ds.features.row(r)) out << v << ",";
    out << ds.labels[r] << "\n";
  }
}

Index train_size(Index n, double train_frac) {
  return static_cast<Index>(std::floor(train_frac * static_cast<double>(n) + 0.5));
}

Split split(const Dataset& ds, double train_frac, std::uint64_t seed, bool stratified) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error("train_frac must lie strictly between 0 and 1");
  }
  const Index n = ds.size();
  const Index total = train_size(n, train_frac);
  if (total == 0 || total == n) throw Error(ds.name + ": split leaves an empty half");

  std::mt19937_64 rng(seed);
  std::vector<Index> train;
  std::vector<Index> test;

  if (!stratified) {
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(total));
    test.assign(order.begin() + static_cast<std::ptrdiff_t>(total), order.end());
  } else {
    std::vector<Index> inliers;
    std::vector<Index> outliers;
    for (Index i = 0; i < n; ++i) (ds.labels[i] == 1 ? outliers : inliers).push_back(i);
    if (inliers.size() < 2 || outliers.size() < 2) {
      throw Error(ds.name + ": stratified split needs at least 2 members per class");
    }
    Index out_train = std::clamp<Index>(train_size(outliers.size(), train_frac), 1,
                                        outliers.size() - 1);
    Index in_train = total - out_train;
    if (in_train < 1 || in_train >= inliers.size()) {
      throw Error(ds.name + ": stratified split infeasible for this train fraction");
    }
    std::shuffle(inliers.begin(), inliers.end(), rng);
    std::shuffle(outliers.begin(), outliers.end(), rng);
    auto take = [&](const std::vector<Index>& cls, Index count) {
      train.insert(train.end(), cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(count));
      test.insert(test.end(), cls.begin() + static_cast<std::ptrdiff_t>(count), cls.end());
    };
    take(inliers, in_train);
    take(outliers, out_train);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

void standardize_features(Matrix& x, std::span<const Index> reference) {
  if (reference.empty()) throw Error("standardize_features: empty reference set");
  for (Index c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (Index r : reference) mean += x(r, c);
    mean /= static_cast<double>(reference.size());
    double var = 0.0;
    for (Index r : reference) var += (x(r, c) - mean) * (x(r, c) - mean);
    double sd = std::sqrt(var / static_cast<double>(reference.size()));
    for (Index r = 0; r < x.rows(); ++r) {
      x(r, c) = sd > 0.0 ? (x(r, c) - mean) / sd : x(r, c) - mean;
    }
  }
}

}  // namespace lscp
