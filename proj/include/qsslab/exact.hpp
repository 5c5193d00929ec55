#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace qsslab {

/// Exact element of Z[sqrt2, i] / 2^m:
///   ((a + b*sqrt2) + i*(c + d*sqrt2)) / 2^m
///
/// Closed under every operation the simulator performs (phases by i, basis
/// changes by 1/sqrt2, Bell projections), so amplitudes never round.
/// Values are kept reduced (m minimal), which makes == structural.
class Exact {
 public:
  constexpr Exact() = default;
  static Exact integer(std::int64_t v) { return Exact(v, 0, 0, 0, 0); }
  static Exact from_parts(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, int m) {
    return Exact(a, b, c, d, m);
  }
  /// 1/sqrt2
  static Exact inv_sqrt2() { return Exact(0, 1, 0, 0, 1); }
  /// i^k
  static Exact i_power(int k);

  bool is_zero() const { return a_ == 0 && b_ == 0 && c_ == 0 && d_ == 0; }
  bool is_real() const { return c_ == 0 && d_ == 0; }

  Exact conj() const { return Exact(a_, b_, -c_, -d_, m_); }
  Exact times_i() const { return Exact(-c_, -d_, a_, b_, m_); }
  Exact times_i_power(int k) const;
  Exact times_sqrt2() const;
  Exact div_sqrt2() const;
  Exact halve() const { return Exact(a_, b_, c_, d_, m_ + 1); }
  /// |z|^2, a real element.
  Exact norm_squared() const;

  friend Exact operator+(const Exact& x, const Exact& y);
  friend Exact operator-(const Exact& x) { return Exact(-x.a_, -x.b_, -x.c_, -x.d_, x.m_); }
  friend Exact operator-(const Exact& x, const Exact& y) { return x + (-y); }
  friend Exact operator*(const Exact& x, const Exact& y);
  friend bool operator==(const Exact&, const Exact&) = default;

  /// For a real value equal to 2^-j (j >= 0), returns sqrt2^j = 1/sqrt(value).
  /// Throws std::domain_error otherwise.
  Exact inverse_sqrt_of_dyadic() const;

  /// Numerator over 2^exponent for a nonnegative dyadic rational (b = c = d = 0).
  /// Throws std::domain_error if the value is not of that form.
  std::int64_t dyadic_numerator(int exponent) const;
  int scale() const { return m_; }

  std::complex<double> to_complex() const;
  std::string to_string() const;

 private:
  Exact(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, int m)
      : a_(a), b_(b), c_(c), d_(d), m_(m) {
    reduce();
  }
  void reduce();

  std::int64_t a_ = 0, b_ = 0, c_ = 0, d_ = 0;
  int m_ = 0;
};

}  // namespace qsslab
