#include "toral/automorphism.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <utility>

#include "toral/error.hpp"

namespace toral {

namespace {

constexpr double kBelowOne = 0x1.fffffffffffffp-1;

// Nearest double to num/q (ties to even), num and q non-negative.
double nearest_double(const BigInt& num, const BigInt& q) {
  const BigRat exact(num, q);
  const double below = mpq_get_d(exact.get_mpq_t());  // truncates toward zero
  const double above = std::nextafter(below, 2.0);
  const BigRat lo(below);
  const BigRat hi(above);
  if (lo == exact) return below;
  const int cmp = ::cmp(BigRat(exact - lo), BigRat(hi - exact));
  if (cmp < 0) return below;
  if (cmp > 0) return above;
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(below));
  std::memcpy(&bits, &below, sizeof(bits));
  return (bits & 1U) == 0 ? below : above;
}

std::vector<BigInt> mat_vec_mod(const IntMatrix& m, const std::vector<BigInt>& x, const BigInt& q) {
  const std::size_t d = m.dim();
  std::vector<BigInt> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    BigInt acc = 0;
    for (std::size_t j = 0; j < d; ++j) acc += m(i, j) * x[j];
    mpz_fdiv_r(acc.get_mpz_t(), acc.get_mpz_t(), q.get_mpz_t());
    out[i] = std::move(acc);
  }
  return out;
}

}  // namespace

RationalTorusPoint::RationalTorusPoint(BigInt denominator, std::vector<BigInt> numerators)
    : q_(std::move(denominator)), num_(std::move(numerators)) {
  if (q_ < 1) throw Error(Errc::InvalidArgument, "denominator must be positive");
  for (const auto& v : num_)
    if (v < 0 || v >= q_) throw Error(Errc::InvalidArgument, "numerators must lie in [0, q)");
}

RationalTorusPoint RationalTorusPoint::zero(std::size_t dim, BigInt denominator) {
  return RationalTorusPoint(std::move(denominator), std::vector<BigInt>(dim, BigInt(0)));
}

std::vector<double> RationalTorusPoint::to_real() const {
  std::vector<double> out;
  out.reserve(num_.size());
  for (const auto& v : num_) out.push_back(std::min(nearest_double(v, q_), kBelowOne));
  return out;
}

TorusAutomorphism::TorusAutomorphism(IntMatrix m) : matrix_(std::move(m)) {
  if (matrix_.dim() < 2) throw Error(Errc::InvalidArgument, "dimension must be at least 2");
  const BigInt det = matrix_.determinant();
  if (det != 1 && det != -1)
    throw Error(Errc::DeterminantNotUnit, "determinant is " + det.get_str() + ", expected +1 or -1");
  det_ = det == 1 ? 1 : -1;
  inverse_ = matrix_.adjugate();
  if (det_ == -1)
    for (std::size_t i = 0; i < inverse_.dim(); ++i)
      for (std::size_t j = 0; j < inverse_.dim(); ++j) inverse_(i, j) = -inverse_(i, j);
  if (matrix_ * inverse_ != IntMatrix::identity(matrix_.dim()))
    throw Error(Errc::InternalInconsistency, "adjugate inverse check failed");
}

RationalTorusPoint TorusAutomorphism::apply(const RationalTorusPoint& x) const {
  if (x.dim() != dim()) throw Error(Errc::InvalidArgument, "point dimension mismatch");
  return RationalTorusPoint(x.denominator(), mat_vec_mod(matrix_, x.numerators(), x.denominator()));
}

RationalTorusPoint TorusAutomorphism::apply_inverse(const RationalTorusPoint& x) const {
  if (x.dim() != dim()) throw Error(Errc::InvalidArgument, "point dimension mismatch");
  return RationalTorusPoint(x.denominator(), mat_vec_mod(inverse_, x.numerators(), x.denominator()));
}

Orbit TorusAutomorphism::orbit(const RationalTorusPoint& x0, std::size_t n) const {
  if (n == 0) throw Error(Errc::InvalidArgument, "orbit length must be at least 1");
  if (x0.dim() != dim()) throw Error(Errc::InvalidArgument, "point dimension mismatch");
  Orbit out{x0, n, {}};
  out.points.reserve(n + 1);
  out.points.push_back(x0);
  if (auto fast = FastStepper::try_create(matrix_, x0.denominator())) {
    std::vector<std::uint64_t> state(dim());
    for (std::size_t i = 0; i < dim(); ++i) state[i] = x0.numerators()[i].get_ui();
    std::vector<BigInt> nums(dim());
    for (std::size_t k = 0; k < n; ++k) {
      fast->step(state);
      for (std::size_t i = 0; i < dim(); ++i) nums[i] = static_cast<unsigned long>(state[i]);
      out.points.emplace_back(x0.denominator(), nums);
    }
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) out.points.push_back(apply(out.points.back()));
  return out;
}

RationalTorusPoint random_point(std::size_t dim, const BigInt& q, Rng& rng) {
  if (q < 2) throw Error(Errc::InvalidArgument, "denominator must be at least 2");
  std::vector<BigInt> nums;
  nums.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) nums.push_back(rng.below(q));
  return RationalTorusPoint(q, std::move(nums));
}

std::optional<FastStepper> FastStepper::try_create(const IntMatrix& m, const BigInt& q) {
  static_assert(sizeof(unsigned long) == 8, "64-bit unsigned long expected");
  if (q < 1 || mpz_sizeinbase(q.get_mpz_t(), 2) > 63) return std::nullopt;
  const BigInt bound = BigInt(1) << 126;
  if (m.max_row_abs_sum() * (q - 1) >= bound) return std::nullopt;
  FastStepper s;
  s.dim_ = m.dim();
  s.q_ = q.get_ui();
  s.entries_.reserve(s.dim_ * s.dim_);
  for (std::size_t i = 0; i < s.dim_; ++i)
    for (std::size_t j = 0; j < s.dim_; ++j) {
      if (!mpz_fits_slong_p(m(i, j).get_mpz_t())) return std::nullopt;
      s.entries_.push_back(m(i, j).get_si());
    }
  return s;
}

void FastStepper::step(std::span<std::uint64_t> x) const noexcept {
  constexpr std::size_t kStack = 16;
  std::array<std::uint64_t, kStack> stack_buf;
  std::vector<std::uint64_t> heap_buf;
  std::uint64_t* out = stack_buf.data();
  if (dim_ > kStack) {
    heap_buf.resize(dim_);
    out = heap_buf.data();
  }
  const auto q = static_cast<__int128>(q_);
  for (std::size_t i = 0; i < dim_; ++i) {
    __int128 acc = 0;
    const std::int64_t* row = entries_.data() + i * dim_;
    for (std::size_t j = 0; j < dim_; ++j) acc += static_cast<__int128>(row[j]) * static_cast<__int128>(x[j]);
    acc %= q;
    if (acc < 0) acc += q;
    out[i] = static_cast<std::uint64_t>(acc);
  }
  for (std::size_t i = 0; i < dim_; ++i) x[i] = out[i];
}

void FastStepper::to_real(std::span<const std::uint64_t> x, std::span<double> out) const noexcept {
  const double qd = static_cast<double>(q_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = std::min(static_cast<double>(x[i]) / qd, kBelowOne);
}

OrbitCursor::OrbitCursor(const TorusAutomorphism& map, const RationalTorusPoint& start)
    : map_(&map), fast_(FastStepper::try_create(map.matrix(), start.denominator())), coords_(map.dim()) {
  if (start.dim() != map.dim()) throw Error(Errc::InvalidArgument, "point dimension mismatch");
  if (fast_) {
    fast_state_.resize(map.dim());
    for (std::size_t i = 0; i < map.dim(); ++i) fast_state_[i] = start.numerators()[i].get_ui();
  } else {
    slow_state_ = start;
  }
  refresh();
}

void OrbitCursor::advance() {
  if (fast_) {
    fast_->step(fast_state_);
  } else {
    slow_state_ = map_->apply(*slow_state_);
  }
  refresh();
}

void OrbitCursor::refresh() {
  if (fast_) {
    fast_->to_real(fast_state_, coords_);
  } else {
    coords_ = slow_state_->to_real();
  }
}

RationalTorusPoint OrbitCursor::point() const {
  if (!fast_) return *slow_state_;
  std::vector<BigInt> nums;
  for (auto v : fast_state_) nums.emplace_back(static_cast<unsigned long>(v));
  return RationalTorusPoint(BigInt(static_cast<unsigned long>(fast_->denominator())), std::move(nums));
}

}  // namespace toral
