#include "lscp/matrix.hpp"

#include <algorithm>
#include <string>

namespace lscp {

Matrix::Matrix(Index rows, Index cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error("matrix data size " + std::to_string(data_.size()) +
                " does not match shape " + std::to_string(rows_) + "x" +
                std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  m.rows_ = rows.size();
  m.cols_ = rows.empty() ? 0 : rows.front().size();
  m.data_.reserve(m.rows_ * m.cols_);
  for (const auto& r : rows) {
    if (r.size() != m.cols_) throw Error("ragged matrix rows");
    m.data_.insert(m.data_.end(), r.begin(), r.end());
  }
  return m;
}

std::vector<double> Matrix::column(Index c) const {
  std::vector<double> out(rows_);
  for (Index r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(Index c, std::span<const double> values) {
  if (values.size() != rows_) throw Error("column length mismatch");
  for (Index r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::select_rows(std::span<const Index> indices) const {
  Matrix out(indices.size(), cols_);
  for (Index i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw Error("row index out of range");
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const Index> indices) const {
  for (Index c : indices) {
    if (c >= cols_) throw Error("column index out of range");
  }
  Matrix out(rows_, indices.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
  }
  return out;
}

}  // namespace lscp
