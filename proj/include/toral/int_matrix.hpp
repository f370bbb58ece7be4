#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace toral {

using BigInt = mpz_class;
using BigRat = mpq_class;

/// Dense square matrix of arbitrary-precision integers, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;

  /// Zero matrix of size dim x dim.
  explicit IntMatrix(std::size_t dim);

  /// Row-major construction; throws NotSquare unless every row has
  /// rows.size() entries, InvalidArgument when dim < 2.
  explicit IntMatrix(const std::vector<std::vector<BigInt>>& rows);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }

  BigInt& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

  /// Exact determinant by fraction-free (Bareiss) elimination.
  BigInt determinant() const;

  /// Exact adjugate: adj(A) * A = det(A) * I.
  IntMatrix adjugate() const;

  /// Largest absolute row sum, the induced sup-norm.
  BigInt max_row_abs_sum() const;

  std::vector<std::vector<BigInt>> rows() const;

  /// "2,1;1,1" style.
  std::string to_inline_string() const;

 private:
  std::size_t dim_ = 0;
  std::vector<BigInt> entries_;
};

}  // namespace toral
