#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace refmon {

using BigInt = mpz_class;
using IntVector = std::vector<BigInt>;

/// Dense integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_columns(const std::vector<IntVector>& columns, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntVector row(std::size_t r) const;
  IntVector col(std::size_t c) const;

  IntMatrix operator*(const IntMatrix& other) const;
  IntVector operator*(const IntVector& v) const;
  bool operator==(const IntMatrix& other) const = default;

  IntMatrix transposed() const;
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  /// col[dst] += k * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  /// Rows [r0, r1) and columns [c0, c1).
  IntMatrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const;
  /// Concatenate columns of other to the right.
  IntMatrix hconcat(const IntMatrix& other) const;
  /// Concatenate rows of other below.
  IntMatrix vconcat(const IntMatrix& other) const;

  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

IntVector make_vector(std::initializer_list<long> values);
IntVector operator+(const IntVector& a, const IntVector& b);
IntVector operator-(const IntVector& a, const IntVector& b);
IntVector operator-(const IntVector& a);
IntVector scaled(const IntVector& a, const BigInt& k);
bool is_zero(const IntVector& v);
std::string to_string(const IntVector& v);

/// Exact determinant (fraction-free Bareiss elimination).
BigInt determinant(const IntMatrix& a);

/// Inverse of a unimodular matrix. Throws InternalInvariantViolation if |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& a);

/// Least nonnegative residue; modulus 0 leaves the value unchanged.
BigInt reduce_mod(const BigInt& x, const BigInt& modulus);

}  // namespace refmon
