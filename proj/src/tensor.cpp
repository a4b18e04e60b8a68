#include "sanid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "sanid/error.hpp"

namespace sanid {
namespace {

void require_positive(std::size_t n, const char* what) {
  if (n == 0) {
    fail(ErrorKind::kDimension, std::string("tensor ") + what + " must be positive");
  }
}

}  // namespace

Tensor::Tensor(std::size_t length) : shape_{length}, data_(length, 0.0) {
  require_positive(length, "length");
}

Tensor::Tensor(std::size_t rows, std::size_t cols)
    : shape_{rows, cols}, data_(rows * cols, 0.0) {
  require_positive(rows, "rows");
  require_positive(cols, "cols");
}

Tensor Tensor::vector(std::vector<double> values) {
  Tensor t(values.size());
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  Tensor t(rows, cols);
  if (values.size() != rows * cols) {
    fail(ErrorKind::kDimension, "matrix data length " +
                                    std::to_string(values.size()) +
                                    " does not match shape " + t.shape_string());
  }
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) fail(ErrorKind::kDimension, "ragged rows in from_rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return matrix(n, m, std::move(values));
}

std::size_t Tensor::rows() const noexcept {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? 1 : shape_[0];
}

std::size_t Tensor::cols() const noexcept {
  if (shape_.empty()) return 0;
  return shape_.back();
}

std::span<double> Tensor::row(std::size_t r) {
  return std::span<double>(data_).subspan(r * cols(), cols());
}

std::span<const double> Tensor::row(std::size_t r) const {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

Tensor Tensor::zeros_like() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_.assign(data_.size(), 0.0);
  return t;
}

std::string Tensor::shape_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out << 'x';
    out << shape_[i];
  }
  out << ']';
  return out.str();
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.shape_ == b.shape_ &&
         (a.data_.empty() ||
          std::memcmp(a.data_.data(), b.data_.data(),
                      a.data_.size() * sizeof(double)) == 0);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    fail(ErrorKind::kDimension, "matmul shape mismatch: " + a.shape_string() +
                                    " x " + b.shape_string());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* dst = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      const double* src = &b(p, 0);
      for (std::size_t j = 0; j < n; ++j) dst[j] += aip * src[j];
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) fail(ErrorKind::kDimension, "transpose needs rank 2, got " + a.shape_string());
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) fail(ErrorKind::kPrecondition, "softmax of an empty vector");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

Tensor softmax(const Tensor& logits) {
  if (logits.rank() > 1) {
    fail(ErrorKind::kDimension, "softmax expects a vector, got " + logits.shape_string());
  }
  return Tensor::vector(softmax(logits.values()));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    fail(ErrorKind::kDimension, "max_abs_diff shape mismatch: " + a.shape_string() +
                                    " vs " + b.shape_string());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::kPrecondition, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace sanid
