#include "qsslab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qsslab {

void Exact::reduce() {
  if (is_zero()) {
    m_ = 0;
    return;
  }
  while (m_ > 0 && ((a_ | b_ | c_ | d_) & 1) == 0) {
    a_ /= 2;
    b_ /= 2;
    c_ /= 2;
    d_ /= 2;
    --m_;
  }
  while (m_ < 0) {
    a_ *= 2;
    b_ *= 2;
    c_ *= 2;
    d_ *= 2;
    ++m_;
  }
}

Exact Exact::i_power(int k) { return integer(1).times_i_power(k); }

Exact Exact::times_i_power(int k) const {
  Exact r = *this;
  for (int n = ((k % 4) + 4) % 4; n > 0; --n) r = r.times_i();
  return r;
}

// (a + b*sqrt2) * sqrt2 = 2b + a*sqrt2
Exact Exact::times_sqrt2() const { return Exact(2 * b_, a_, 2 * d_, c_, m_); }

Exact Exact::div_sqrt2() const { return Exact(2 * b_, a_, 2 * d_, c_, m_ + 1); }

Exact operator+(const Exact& x, const Exact& y) {
  const int m = std::max(x.m_, y.m_);
  const std::int64_t fx = std::int64_t{1} << (m - x.m_);
  const std::int64_t fy = std::int64_t{1} << (m - y.m_);
  return Exact(x.a_ * fx + y.a_ * fy, x.b_ * fx + y.b_ * fy, x.c_ * fx + y.c_ * fy,
               x.d_ * fx + y.d_ * fy, m);
}

Exact operator*(const Exact& x, const Exact& y) {
  // Real-quadratic parts multiply as (p + q sqrt2)(r + s sqrt2) = (pr + 2qs) + (ps + qr) sqrt2.
  auto mul = [](std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s) {
    return std::pair{p * r + 2 * q * s, p * s + q * r};
  };
  auto [rr_a, rr_b] = mul(x.a_, x.b_, y.a_, y.b_);
  auto [ii_a, ii_b] = mul(x.c_, x.d_, y.c_, y.d_);
  auto [ri_a, ri_b] = mul(x.a_, x.b_, y.c_, y.d_);
  auto [ir_a, ir_b] = mul(x.c_, x.d_, y.a_, y.b_);
  return Exact(rr_a - ii_a, rr_b - ii_b, ri_a + ir_a, ri_b + ir_b, x.m_ + y.m_);
}

Exact Exact::norm_squared() const { return *this * conj(); }

Exact Exact::inverse_sqrt_of_dyadic() const {
  if (!(b_ == 0 && c_ == 0 && d_ == 0 && a_ == 1)) {
    throw std::domain_error("value is not a power of 1/2: " + to_string());
  }
  Exact r = integer(1);
  for (int j = 0; j < m_; ++j) r = r.times_sqrt2();
  return r;
}

std::int64_t Exact::dyadic_numerator(int exponent) const {
  if (b_ != 0 || c_ != 0 || d_ != 0 || a_ < 0 || m_ > exponent) {
    throw std::domain_error("value is not a nonnegative dyadic rational: " + to_string());
  }
  return a_ << (exponent - m_);
}

std::complex<double> Exact::to_complex() const {
  const double s = std::numbers::sqrt2;
  const double scale = std::ldexp(1.0, -m_);
  return {(a_ + b_ * s) * scale, (c_ + d_ * s) * scale};
}

std::string Exact::to_string() const {
  std::ostringstream os;
  os << "((" << a_ << "+" << b_ << "r2)+i(" << c_ << "+" << d_ << "r2))/2^" << m_;
  return os.str();
}

}  // namespace qsslab
