#include "thesee/rational.hpp"

#include <limits>

#include "thesee/error.hpp"

namespace thesee {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(i128 v) {
  return v > static_cast<i128>(std::numeric_limits<int64_t>::min()) &&
         v <= static_cast<i128>(std::numeric_limits<int64_t>::max());
}

}  // namespace

Rational Rational::from_wide(i128 num, i128 den) {
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits(num) || !fits(den)) throw OverflowError();
  Rational r;
  r.num_ = static_cast<int64_t>(num);
  r.den_ = static_cast<int64_t>(den);
  return r;
}

Rational Rational::make(int64_t num, int64_t den) { return from_wide(num, den); }

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw Error(ErrorKind::InvalidArgument, "invalid number '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  bool neg = false;
  size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  i128 num = 0;
  i128 den = 1;
  bool digits = false;
  bool fraction_digits = false;
  auto bump = [&](i128& v, char c) {
    v = v * 10 + (c - '0');
    if (v > (static_cast<i128>(1) << 100)) throw OverflowError();
  };
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
    bump(num, text[i]);
    digits = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      bump(num, text[i]);
      den *= 10;
      if (den > (static_cast<i128>(1) << 100)) throw OverflowError();
      fraction_digits = true;
    }
    if (!fraction_digits) return fail();
  } else if (i < text.size() && text[i] == '/') {
    ++i;
    den = 0;
    bool den_digits = false;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      bump(den, text[i]);
      den_digits = true;
    }
    if (!den_digits || den == 0) return fail();
  }
  if (!digits || i != text.size()) return fail();
  return from_wide(neg ? -num : num, den);
}

Rational Rational::floor() const {
  if (den_ == 1) return *this;
  int64_t q = num_ / den_;
  if (num_ < 0) --q;
  return Rational(q);
}

Rational Rational::ceil() const {
  if (den_ == 1) return *this;
  int64_t q = num_ / den_;
  if (num_ > 0) ++q;
  return Rational(q);
}

Rational Rational::operator-() const { return from_wide(-static_cast<i128>(num_), den_); }

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == 1 && b.den_ == 1) return Rational::from_wide(static_cast<i128>(a.num_) + b.num_, 1);
  return Rational::from_wide(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                             static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  if (a.den_ == 1 && b.den_ == 1) return Rational::from_wide(static_cast<i128>(a.num_) - b.num_, 1);
  return Rational::from_wide(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                             static_cast<i128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw Error(ErrorKind::InvalidArgument, "rational division by zero");
  return Rational::from_wide(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  i128 l = static_cast<i128>(a.num_) * b.den_;
  i128 r = static_cast<i128>(b.num_) * a.den_;
  return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

size_t Rational::hash() const {
  uint64_t h = static_cast<uint64_t>(num_) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<uint64_t>(den_) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
  return static_cast<size_t>(h);
}

Bound Bound::parse(std::string_view text) {
  if (text == "inf" || text == "+inf") return pos_inf();
  if (text == "-inf") return neg_inf();
  return Bound(Rational::parse(text));
}

Bound Bound::operator-() const {
  switch (kind_) {
    case Kind::NegInf:
      return pos_inf();
    case Kind::PosInf:
      return neg_inf();
    case Kind::Finite:
      break;
  }
  return Bound(-value_);
}

bool operator==(const Bound& a, const Bound& b) {
  if (a.kind_ != b.kind_) return false;
  return a.kind_ != Bound::Kind::Finite || a.value_ == b.value_;
}

std::strong_ordering operator<=>(const Bound& a, const Bound& b) {
  if (a.kind_ != b.kind_ || a.kind_ != Bound::Kind::Finite) {
    if (a.kind_ == b.kind_) return std::strong_ordering::equal;
    return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  }
  return a.value_ <=> b.value_;
}

std::string Bound::str() const {
  switch (kind_) {
    case Kind::NegInf:
      return "-inf";
    case Kind::PosInf:
      return "inf";
    case Kind::Finite:
      break;
  }
  return value_.str();
}

}  // namespace thesee
