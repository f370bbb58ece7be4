#include "toral/int_matrix.hpp"

#include <utility>

#include "toral/error.hpp"

namespace toral {

IntMatrix::IntMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

IntMatrix::IntMatrix(const std::vector<std::vector<BigInt>>& rows) : dim_(rows.size()) {
  if (dim_ < 2) throw Error(Errc::InvalidArgument, "matrix dimension must be at least 2");
  entries_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(Errc::NotSquare, "every row must have " + std::to_string(dim_) + " entries");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<std::vector<BigInt>> converted;
  for (const auto& row : rows) {
    auto& out = converted.emplace_back();
    for (long v : row) out.emplace_back(v);
  }
  *this = IntMatrix(converted);
}

IntMatrix IntMatrix::identity(std::size_t dim) {
  IntMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
  return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim_ != b.dim_) throw Error(Errc::InvalidArgument, "dimension mismatch in matrix product");
  const std::size_t d = a.dim_;
  IntMatrix out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < d; ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

namespace {

// Bareiss elimination on a copy; every division is exact.
BigInt bareiss_determinant(std::vector<BigInt> m, std::size_t n) {
  if (n == 0) return 1;
  auto at = [&](std::size_t r, std::size_t c) -> BigInt& { return m[r * n + c]; };
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && at(swap_row, k) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(at(k, c), at(swap_row, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        BigInt v = at(i, j) * at(k, k) - at(i, k) * at(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        at(i, j) = std::move(v);
      }
    }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

}  // namespace

BigInt IntMatrix::determinant() const { return bareiss_determinant(entries_, dim_); }

IntMatrix IntMatrix::adjugate() const {
  const std::size_t d = dim_;
  IntMatrix adj(d);
  std::vector<BigInt> minor((d - 1) * (d - 1));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < d; ++i) {
        if (i == r) continue;
        for (std::size_t j = 0; j < d; ++j) {
          if (j == c) continue;
          minor[idx++] = (*this)(i, j);
        }
      }
      BigInt cof = bareiss_determinant(minor, d - 1);
      if ((r + c) % 2 == 1) cof = -cof;
      adj(c, r) = std::move(cof);
    }
  }
  return adj;
}

BigInt IntMatrix::max_row_abs_sum() const {
  BigInt best = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    BigInt s = 0;
    for (std::size_t j = 0; j < dim_; ++j) s += abs((*this)(i, j));
    if (s > best) best = s;
  }
  return best;
}

std::vector<std::vector<BigInt>> IntMatrix::rows() const {
  std::vector<std::vector<BigInt>> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i].assign(entries_.begin() + i * dim_, entries_.begin() + (i + 1) * dim_);
  return out;
}

std::string IntMatrix::to_inline_string() const {
  std::string s;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (i) s += ';';
    for (std::size_t j = 0; j < dim_; ++j) {
      if (j) s += ',';
      s += (*this)(i, j).get_str();
    }
  }
  return s;
}

}  // namespace toral
