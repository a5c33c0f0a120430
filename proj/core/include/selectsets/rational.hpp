#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace selectsets {

// Percentile parameter p = num/den with 0 < p <= 1, stored in lowest terms.
// Ceiling arithmetic on p stays in integers end to end; p is only converted
// to double for reporting.
class RationalP {
 public:
  RationalP(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("percentile: zero denominator");
    if (num_ == 0) throw std::invalid_argument("percentile: p must be positive");
    if (num_ > den_) throw std::invalid_argument("percentile: p must be <= 1");
    const std::uint64_t g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  std::uint64_t num() const noexcept { return num_; }
  std::uint64_t den() const noexcept { return den_; }
  bool is_one() const noexcept { return num_ == den_; }
  double value() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend bool operator==(const RationalP&, const RationalP&) = default;

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

// ceil(p * k), with the k = 0 case pinned to 1 (the cutoff function of a
// percentile rule is 1 on an empty retained set, not ceil(0) = 0).
inline std::uint64_t ceil_mul(const RationalP& p, std::uint64_t k) {
  if (k == 0) return 1;
  const unsigned __int128 t =
      static_cast<unsigned __int128>(p.num()) * k + (p.den() - 1);
  const unsigned __int128 q = t / p.den();
  if (q > UINT64_MAX) throw std::overflow_error("ceil_mul: result exceeds 64 bits");
  return static_cast<std::uint64_t>(q);
}

// Numerator of ceil(p*k) - p*k over denominator p.den(), as an exact integer
// in [0, den). Uses the raw ceiling (no k = 0 override); the gap at k = 0 is 0.
inline std::uint64_t ceil_gap_num(const RationalP& p, std::uint64_t k) {
  const unsigned __int128 nk = static_cast<unsigned __int128>(p.num()) * k;
  const unsigned __int128 c = (nk + (p.den() - 1)) / p.den();
  return static_cast<std::uint64_t>(c * p.den() - nk);
}

// Exact signed rational on 64-bit words. Every operation range-checks its
// 128-bit intermediates and throws std::overflow_error rather than wrap;
// callers stay within small-n enumeration sizes where this never fires.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    reduce();
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
    const __int128 d = i128(a.den_) * b.den_;
    return from_i128(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    const __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
    const __int128 d = i128(a.den_) * b.den_;
    return from_i128(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("rational: division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ <= i128(b.num_) * a.den_;
  }

 private:
  static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

  static Rational from_i128(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("rational: value exceeds 64-bit range");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void reduce() {
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace selectsets
