#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace forge {

/**
 * Signed arbitrary-precision integer.
 *
 * Sign-magnitude representation over base-2^32 limbs (little-endian,
 * no leading zero limb; zero is the empty limb vector).  Supports the
 * operations needed by exact lattice arithmetic: ring operations,
 * comparisons, floor division, and gcd.
 */
class Bigint {
 public:
  Bigint() = default;
  Bigint(long long v);  // NOLINT: implicit on purpose, mirrors int literals

  static Bigint from_string(const std::string& text);

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return sign_ < 0; }
  /** -1, 0 or +1. */
  int signum() const { return sign_; }

  Bigint operator-() const;
  Bigint abs() const;

  friend Bigint operator+(const Bigint& a, const Bigint& b);
  friend Bigint operator-(const Bigint& a, const Bigint& b);
  friend Bigint operator*(const Bigint& a, const Bigint& b);

  Bigint& operator+=(const Bigint& o) { return *this = *this + o; }
  Bigint& operator-=(const Bigint& o) { return *this = *this - o; }
  Bigint& operator*=(const Bigint& o) { return *this = *this * o; }

  /**
   * Floor division: quotient rounds toward negative infinity, so the
   * remainder always has the sign of the divisor (zero included).
   * Throws std::domain_error on division by zero.
   */
  static void divmod_floor(const Bigint& a, const Bigint& b, Bigint& q,
                           Bigint& r);
  Bigint operator/(const Bigint& b) const;  // floor quotient
  Bigint operator%(const Bigint& b) const;  // floor remainder

  /** Non-negative greatest common divisor; gcd(0, 0) = 0. */
  static Bigint gcd(Bigint a, Bigint b);

  /** Comparison: negative/zero/positive like strcmp. */
  int compare(const Bigint& o) const;
  friend bool operator==(const Bigint& a, const Bigint& b) {
    return a.compare(b) == 0;
  }
  friend bool operator!=(const Bigint& a, const Bigint& b) {
    return a.compare(b) != 0;
  }
  friend bool operator<(const Bigint& a, const Bigint& b) {
    return a.compare(b) < 0;
  }
  friend bool operator<=(const Bigint& a, const Bigint& b) {
    return a.compare(b) <= 0;
  }
  friend bool operator>(const Bigint& a, const Bigint& b) {
    return a.compare(b) > 0;
  }
  friend bool operator>=(const Bigint& a, const Bigint& b) {
    return a.compare(b) >= 0;
  }

  std::string to_string() const;
  /** Throws std::overflow_error when the value does not fit. */
  long long to_int64() const;
  bool fits_int64() const;

 private:
  int sign_ = 0;
  std::vector<std::uint32_t> limbs_;

  void trim();
  static int compare_mag(const std::vector<std::uint32_t>& a,
                         const std::vector<std::uint32_t>& b);
  static std::vector<std::uint32_t> add_mag(
      const std::vector<std::uint32_t>& a,
      const std::vector<std::uint32_t>& b);
  static std::vector<std::uint32_t> sub_mag(
      const std::vector<std::uint32_t>& a,
      const std::vector<std::uint32_t>& b);
  static std::vector<std::uint32_t> mul_mag(
      const std::vector<std::uint32_t>& a,
      const std::vector<std::uint32_t>& b);
  static void divmod_mag(const std::vector<std::uint32_t>& a,
                         const std::vector<std::uint32_t>& b,
                         std::vector<std::uint32_t>& q,
                         std::vector<std::uint32_t>& r);
};

/**
 * Exact rational number over Bigint.
 *
 * Invariants: denominator > 0, gcd(|num|, den) = 1, zero is 0/1.
 */
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT: implicit on purpose
  /** Throws std::domain_error when den is zero. */
  Rational(Bigint num, Bigint den);

  /** Parses "p/q" or a plain integer "p". */
  static Rational from_string(const std::string& text);

  const Bigint& num() const { return num_; }
  const Bigint& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == Bigint(1); }
  int signum() const { return num_.signum(); }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  /** Throws std::domain_error when b is zero. */
  friend Rational operator/(const Rational& a, const Rational& b);

  int compare(const Rational& o) const;
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.compare(b) == 0;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return a.compare(b) != 0;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.compare(b) < 0;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.compare(b) <= 0;
  }
  friend bool operator>(const Rational& a, const Rational& b) {
    return a.compare(b) > 0;
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return a.compare(b) >= 0;
  }

  /** Canonical "p/q" form (denominator kept even when it is 1). */
  std::string to_string() const;

  /** Largest integer <= value. */
  Bigint floor() const;

 private:
  Bigint num_;
  Bigint den_;
  void reduce();
};

}  // namespace forge
