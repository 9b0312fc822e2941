#include "forge/bigint.hpp"

#include <algorithm>
#include <stdexcept>

namespace forge {

namespace {
constexpr std::uint64_t kBase = 1ULL << 32;
}

Bigint::Bigint(long long v) {
  if (v == 0) return;
  sign_ = v < 0 ? -1 : 1;
  // Avoid overflow on LLONG_MIN by widening through unsigned arithmetic.
  std::uint64_t mag =
      v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
  while (mag != 0) {
    limbs_.push_back(static_cast<std::uint32_t>(mag & 0xffffffffULL));
    mag >>= 32;
  }
}

void Bigint::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) sign_ = 0;
}

int Bigint::compare_mag(const std::vector<std::uint32_t>& a,
                        const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::vector<std::uint32_t> Bigint::add_mag(
    const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(std::max(a.size(), b.size()) + 1);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    std::uint64_t sum = carry;
    if (i < a.size()) sum += a[i];
    if (i < b.size()) sum += b[i];
    out.push_back(static_cast<std::uint32_t>(sum & 0xffffffffULL));
    carry = sum >> 32;
  }
  if (carry) out.push_back(static_cast<std::uint32_t>(carry));
  return out;
}

std::vector<std::uint32_t> Bigint::sub_mag(
    const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  // Precondition: |a| >= |b|.
  std::vector<std::uint32_t> out;
  out.reserve(a.size());
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::int64_t diff = static_cast<std::int64_t>(a[i]) - borrow -
                        (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
    if (diff < 0) {
      diff += static_cast<std::int64_t>(kBase);
      borrow = 1;
    } else {
      borrow = 0;
    }
    out.push_back(static_cast<std::uint32_t>(diff));
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::vector<std::uint32_t> Bigint::mul_mag(
    const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<std::uint32_t> out(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::uint64_t cur = static_cast<std::uint64_t>(a[i]) * b[j] +
                          out[i + j] + carry;
      out[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
    }
    std::size_t k = i + b.size();
    while (carry) {
      std::uint64_t cur = out[k] + carry;
      out[k] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
      ++k;
    }
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

void Bigint::divmod_mag(const std::vector<std::uint32_t>& a,
                        const std::vector<std::uint32_t>& b,
                        std::vector<std::uint32_t>& q,
                        std::vector<std::uint32_t>& r) {
  // Binary long division: simple and fully exact; operand sizes in this
  // project stay tiny, so the O(bits * limbs) cost is irrelevant.
  q.assign(a.size(), 0);
  r.clear();
  if (compare_mag(a, b) < 0) {
    r = a;
    q.clear();
    return;
  }
  std::vector<std::uint32_t> rem;
  for (std::size_t bit_total = a.size() * 32; bit_total-- > 0;) {
    const std::size_t limb = bit_total / 32;
    const std::uint32_t bit = (a[limb] >> (bit_total % 32)) & 1u;
    // rem = rem * 2 + bit
    std::uint32_t carry = bit;
    for (std::size_t i = 0; i < rem.size(); ++i) {
      std::uint32_t next = rem[i] >> 31;
      rem[i] = (rem[i] << 1) | carry;
      carry = next;
    }
    if (carry) rem.push_back(carry);
    if (compare_mag(rem, b) >= 0) {
      rem = sub_mag(rem, b);
      q[limb] |= 1u << (bit_total % 32);
    }
  }
  while (!q.empty() && q.back() == 0) q.pop_back();
  r = rem;
}

Bigint Bigint::operator-() const {
  Bigint out = *this;
  out.sign_ = -out.sign_;
  return out;
}

Bigint Bigint::abs() const {
  Bigint out = *this;
  if (out.sign_ < 0) out.sign_ = 1;
  return out;
}

Bigint operator+(const Bigint& a, const Bigint& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  Bigint out;
  if (a.sign_ == b.sign_) {
    out.sign_ = a.sign_;
    out.limbs_ = Bigint::add_mag(a.limbs_, b.limbs_);
  } else {
    int cmp = Bigint::compare_mag(a.limbs_, b.limbs_);
    if (cmp == 0) return Bigint();
    if (cmp > 0) {
      out.sign_ = a.sign_;
      out.limbs_ = Bigint::sub_mag(a.limbs_, b.limbs_);
    } else {
      out.sign_ = b.sign_;
      out.limbs_ = Bigint::sub_mag(b.limbs_, a.limbs_);
    }
  }
  out.trim();
  return out;
}

Bigint operator-(const Bigint& a, const Bigint& b) { return a + (-b); }

Bigint operator*(const Bigint& a, const Bigint& b) {
  Bigint out;
  if (a.is_zero() || b.is_zero()) return out;
  out.sign_ = a.sign_ * b.sign_;
  out.limbs_ = Bigint::mul_mag(a.limbs_, b.limbs_);
  out.trim();
  return out;
}

void Bigint::divmod_floor(const Bigint& a, const Bigint& b, Bigint& q,
                          Bigint& r) {
  if (b.is_zero()) throw std::domain_error("Bigint: division by zero");
  Bigint qt, rt;
  divmod_mag(a.limbs_, b.limbs_, qt.limbs_, rt.limbs_);
  qt.sign_ = qt.limbs_.empty() ? 0 : a.sign_ * b.sign_;
  rt.sign_ = rt.limbs_.empty() ? 0 : a.sign_;
  qt.trim();
  rt.trim();
  // Truncated -> floor adjustment when signs disagree and remainder != 0.
  if (!rt.is_zero() && rt.sign_ != b.sign_) {
    qt = qt - Bigint(1);
    rt = rt + b;
  }
  q = qt;
  r = rt;
}

Bigint Bigint::operator/(const Bigint& b) const {
  Bigint q, r;
  divmod_floor(*this, b, q, r);
  return q;
}

Bigint Bigint::operator%(const Bigint& b) const {
  Bigint q, r;
  divmod_floor(*this, b, q, r);
  return r;
}

Bigint Bigint::gcd(Bigint a, Bigint b) {
  a = a.abs();
  b = b.abs();
  while (!b.is_zero()) {
    Bigint r = a % b;
    a = b;
    b = r;
  }
  return a;
}

int Bigint::compare(const Bigint& o) const {
  if (sign_ != o.sign_) return sign_ < o.sign_ ? -1 : 1;
  int mag = compare_mag(limbs_, o.limbs_);
  return sign_ >= 0 ? mag : -mag;
}

Bigint Bigint::from_string(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("Bigint: empty string");
  std::size_t pos = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size())
    throw std::invalid_argument("Bigint: no digits in \"" + text + "\"");
  Bigint out;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c < '0' || c > '9')
      throw std::invalid_argument("Bigint: bad digit in \"" + text + "\"");
    out = out * Bigint(10) + Bigint(c - '0');
  }
  if (neg) out = -out;
  return out;
}

std::string Bigint::to_string() const {
  if (is_zero()) return "0";
  std::vector<std::uint32_t> mag = limbs_;
  std::string digits;
  const std::vector<std::uint32_t> ten = {10u};
  while (!mag.empty()) {
    std::vector<std::uint32_t> q, r;
    divmod_mag(mag, ten, q, r);
    digits.push_back(static_cast<char>('0' + (r.empty() ? 0 : r[0])));
    mag = q;
  }
  if (sign_ < 0) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

bool Bigint::fits_int64() const {
  if (limbs_.size() < 2) return true;
  if (limbs_.size() > 2) return false;
  std::uint64_t mag =
      (static_cast<std::uint64_t>(limbs_[1]) << 32) | limbs_[0];
  return sign_ > 0 ? mag <= 0x7fffffffffffffffULL
                   : mag <= 0x8000000000000000ULL;
}

long long Bigint::to_int64() const {
  if (!fits_int64())
    throw std::overflow_error("Bigint: value does not fit in 64 bits: " +
                              to_string());
  std::uint64_t mag = 0;
  if (!limbs_.empty()) mag = limbs_[0];
  if (limbs_.size() == 2) mag |= static_cast<std::uint64_t>(limbs_[1]) << 32;
  if (sign_ < 0) return static_cast<long long>(~mag + 1);
  return static_cast<long long>(mag);
}

Rational::Rational(Bigint num, Bigint den) : num_(num), den_(den) {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  reduce();
}

void Rational::reduce() {
  if (den_.is_negative()) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = Bigint(1);
    return;
  }
  // Floor division on an exact multiple is plain division for any sign.
  Bigint g = Bigint::gcd(num_, den_);
  num_ = num_ / g;
  den_ = den_ / g;
}

Rational Rational::from_string(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos)
    return Rational(Bigint::from_string(text), Bigint(1));
  return Rational(Bigint::from_string(text.substr(0, slash)),
                  Bigint::from_string(text.substr(slash + 1)));
}

Rational Rational::operator-() const {
  Rational out = *this;
  out.num_ = -out.num_;
  return out;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

int Rational::compare(const Rational& o) const {
  return (num_ * o.den_).compare(o.num_ * den_);
}

std::string Rational::to_string() const {
  return num_.to_string() + "/" + den_.to_string();
}

Bigint Rational::floor() const { return num_ / den_; }

}  // namespace forge
