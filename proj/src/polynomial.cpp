#include "toral/polynomial.hpp"

#include <algorithm>
#include <utility>

#include "toral/error.hpp"

namespace toral {

IntPolynomial::IntPolynomial(std::vector<BigInt> coefficients) : c_(std::move(coefficients)) { normalize(); }

IntPolynomial::IntPolynomial(std::initializer_list<long> coefficients) {
  for (long v : coefficients) c_.emplace_back(v);
  normalize();
}

void IntPolynomial::normalize() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigRat IntPolynomial::evaluate(const BigRat& x) const {
  BigRat acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + BigRat(*it);
  return acc;
}

IntPolynomial IntPolynomial::reversed() const { return IntPolynomial(std::vector<BigInt>(c_.rbegin(), c_.rend())); }

IntPolynomial IntPolynomial::derivative() const {
  std::vector<BigInt> out;
  for (std::size_t i = 1; i < c_.size(); ++i) out.push_back(c_[i] * static_cast<unsigned long>(i));
  return IntPolynomial(std::move(out));
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return IntPolynomial(std::move(out));
}

RatPolynomial IntPolynomial::to_rational() const {
  std::vector<BigRat> out;
  out.reserve(c_.size());
  for (const auto& v : c_) out.emplace_back(v);
  return RatPolynomial(std::move(out));
}

std::string IntPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::string s;
  for (int i = degree(); i >= 0; --i) {
    const BigInt& v = c_[static_cast<std::size_t>(i)];
    if (v == 0) continue;
    const BigInt mag = abs(v);
    if (s.empty()) {
      if (v < 0) s += "-";
    } else {
      s += v < 0 ? " - " : " + ";
    }
    const bool unit = mag == 1;
    if (i == 0 || !unit) s += mag.get_str();
    if (i > 0 && !unit) s += "*";
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s;
}

RatPolynomial::RatPolynomial(std::vector<BigRat> coefficients) : c_(std::move(coefficients)) {
  for (auto& v : c_) v.canonicalize();
  normalize();
}

void RatPolynomial::normalize() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigRat RatPolynomial::evaluate(const BigRat& x) const {
  BigRat acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RatPolynomial RatPolynomial::derivative() const {
  std::vector<BigRat> out;
  for (std::size_t i = 1; i < c_.size(); ++i) out.push_back(c_[i] * BigRat(static_cast<unsigned long>(i)));
  return RatPolynomial(std::move(out));
}

RatPolynomial RatPolynomial::monic() const {
  if (c_.empty()) return {};
  std::vector<BigRat> out(c_);
  const BigRat lead = c_.back();
  for (auto& v : out) v /= lead;
  return RatPolynomial(std::move(out));
}

RatPolynomial RatPolynomial::operator-() const {
  std::vector<BigRat> out(c_);
  for (auto& v : out) v = -v;
  return RatPolynomial(std::move(out));
}

RatPolynomial operator+(const RatPolynomial& a, const RatPolynomial& b) {
  std::vector<BigRat> out(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] += b.c_[i];
  return RatPolynomial(std::move(out));
}

RatPolynomial operator-(const RatPolynomial& a, const RatPolynomial& b) { return a + (-b); }

RatPolynomial operator*(const RatPolynomial& a, const RatPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigRat> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return RatPolynomial(std::move(out));
}

RatPolynomial::DivMod RatPolynomial::divmod(const RatPolynomial& divisor) const {
  if (divisor.is_zero()) throw Error(Errc::InvalidArgument, "polynomial division by zero");
  std::vector<BigRat> rem(c_);
  if (degree() < divisor.degree()) return {RatPolynomial{}, *this};
  const std::size_t dd = divisor.c_.size() - 1;
  std::vector<BigRat> quot(c_.size() - dd);
  for (std::size_t i = c_.size(); i-- > dd;) {
    if (rem[i] == 0) continue;
    const BigRat factor = rem[i] / divisor.c_.back();
    quot[i - dd] = factor;
    for (std::size_t j = 0; j <= dd; ++j) rem[i - dd + j] -= factor * divisor.c_[j];
  }
  rem.resize(dd);
  return {RatPolynomial(std::move(quot)), RatPolynomial(std::move(rem))};
}

IntPolynomial RatPolynomial::primitive_part() const {
  if (c_.empty()) return {};
  BigInt lcm_den = 1;
  for (const auto& v : c_) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), v.get_den_mpz_t());
  std::vector<BigInt> ints;
  BigInt content = 0;
  for (const auto& v : c_) {
    BigInt n = v.get_num() * (lcm_den / v.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), n.get_mpz_t());
    ints.push_back(std::move(n));
  }
  const bool flip = ints.back() < 0;
  for (auto& n : ints) {
    n /= content;
    if (flip) n = -n;
  }
  return IntPolynomial(std::move(ints));
}

RatPolynomial gcd(const RatPolynomial& a, const RatPolynomial& b) {
  RatPolynomial x = a;
  RatPolynomial y = b;
  while (!y.is_zero()) {
    RatPolynomial r = x.divmod(y).remainder;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

namespace {

int sign_variations(const std::vector<RatPolynomial>& chain, const BigRat& x) {
  int changes = 0;
  int last = 0;
  for (const auto& p : chain) {
    const int s = sgn(p.evaluate(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

int sturm_count(const RatPolynomial& p, const BigRat& lo, const BigRat& hi) {
  if (p.is_zero()) throw Error(Errc::InvalidArgument, "Sturm sequence of the zero polynomial");
  if (p.degree() == 0) return 0;
  // Square-free part: distinct roots only.
  const RatPolynomial g = gcd(p, p.derivative());
  const RatPolynomial sf = p.divmod(g).quotient;
  std::vector<RatPolynomial> chain{sf, sf.derivative()};
  while (chain.back().degree() > 0) {
    RatPolynomial r = chain[chain.size() - 2].divmod(chain.back()).remainder;
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  return sign_variations(chain, lo) - sign_variations(chain, hi);
}

}  // namespace toral
