#include "refmon/matrix.hpp"

#include <sstream>
#include <utility>

#include "refmon/errors.hpp"

namespace refmon {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw PreconditionViolated("ragged matrix literal");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& columns, std::size_t rows) {
  IntMatrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw PreconditionViolated("column length mismatch");
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

IntVector IntMatrix::row(std::size_t r) const {
  return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

IntVector IntMatrix::col(std::size_t c) const {
  IntVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw PreconditionViolated("matrix product dimension mismatch");
  IntMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) {
        if (sgn(other(k, j)) != 0) out(i, j) += a * other(k, j);
      }
    }
  }
  return out;
}

IntVector IntMatrix::operator*(const IntVector& v) const {
  if (cols_ != v.size()) throw PreconditionViolated("matrix-vector dimension mismatch");
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    BigInt acc = 0;
    for (std::size_t k = 0; k < cols_; ++k) {
      if (sgn(v[k]) != 0 && sgn((*this)(i, k)) != 0) acc += (*this)(i, k) * v[k];
    }
    out[i] = acc;
  }
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool IntMatrix::is_zero() const {
  for (const auto& x : data_)
    if (sgn(x) != 0) return false;
  return true;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (sgn(k) == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (sgn((*this)(src, j)) != 0) (*this)(dst, j) += k * (*this)(src, j);
  }
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (sgn(k) == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (sgn((*this)(i, src)) != 0) (*this)(i, dst) += k * (*this)(i, src);
  }
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

void IntMatrix::negate_col(std::size_t c) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
}

IntMatrix IntMatrix::block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
  IntMatrix out(r1 - r0, c1 - c0);
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = c0; j < c1; ++j) out(i - r0, j - c0) = (*this)(i, j);
  return out;
}

IntMatrix IntMatrix::hconcat(const IntMatrix& other) const {
  if (rows_ != other.rows_) throw PreconditionViolated("hconcat row mismatch");
  IntMatrix out(rows_, cols_ + other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
    for (std::size_t j = 0; j < other.cols_; ++j) out(i, cols_ + j) = other(i, j);
  }
  return out;
}

IntMatrix IntMatrix::vconcat(const IntMatrix& other) const {
  if (cols_ != other.cols_) throw PreconditionViolated("vconcat column mismatch");
  IntMatrix out(rows_ + other.rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
  for (std::size_t i = 0; i < other.rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(rows_ + i, j) = other(i, j);
  return out;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << ',';
    os << '[';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ',';
      os << (*this)(i, j).get_str();
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

IntVector make_vector(std::initializer_list<long> values) {
  IntVector v;
  v.reserve(values.size());
  for (long x : values) v.emplace_back(x);
  return v;
}

IntVector operator+(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw PreconditionViolated("vector length mismatch");
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntVector operator-(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw PreconditionViolated("vector length mismatch");
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

IntVector operator-(const IntVector& a) {
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

IntVector scaled(const IntVector& a, const BigInt& k) {
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * k;
  return out;
}

bool is_zero(const IntVector& v) {
  for (const auto& x : v)
    if (sgn(x) != 0) return false;
  return true;
}

std::string to_string(const IntVector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i].get_str();
  }
  return s + "]";
}

BigInt determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw PreconditionViolated("determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(m(k, k)) == 0) {
      std::size_t p = k + 1;
      while (p < n && sgn(m(p, k)) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        BigInt t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = t;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  BigInt d = m(n - 1, n - 1);
  return sign < 0 ? BigInt(-d) : d;
}

IntMatrix unimodular_inverse(const IntMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw PreconditionViolated("inverse of non-square matrix");
  std::vector<mpq_class> m(n * 2 * n);
  auto at = [&](std::size_t i, std::size_t j) -> mpq_class& { return m[i * 2 * n + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = a(i, j);
    at(i, n + i) = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(at(p, c)) == 0) ++p;
    if (p == n) throw InternalInvariantViolation("singular matrix is not unimodular");
    if (p != c)
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(at(p, j), at(c, j));
    mpq_class inv = 1 / at(c, c);
    for (std::size_t j = 0; j < 2 * n; ++j) at(c, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || sgn(at(i, c)) == 0) continue;
      mpq_class f = at(i, c);
      for (std::size_t j = 0; j < 2 * n; ++j) at(i, j) -= f * at(c, j);
    }
  }
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const mpq_class& q = at(i, n + j);
      if (q.get_den() != 1) throw InternalInvariantViolation("matrix is not unimodular");
      out(i, j) = q.get_num();
    }
  }
  return out;
}

BigInt reduce_mod(const BigInt& x, const BigInt& modulus) {
  if (sgn(modulus) == 0) return x;
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

}  // namespace refmon
