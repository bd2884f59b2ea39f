#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace thesee {

// Exact rational number with 64-bit numerator and positive denominator, always
// kept in lowest terms. Operations that leave the representable range throw
// OverflowError.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)

  static Rational make(int64_t num, int64_t den);
  static Rational parse(std::string_view text);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  Rational floor() const;
  Rational ceil() const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  std::string str() const;
  size_t hash() const;

 private:
  static Rational from_wide(__int128 num, __int128 den);

  int64_t num_ = 0;
  int64_t den_ = 1;
};

// A rational extended with -inf and +inf, used for interval bounds.
class Bound {
 public:
  enum class Kind : uint8_t { NegInf, Finite, PosInf };

  constexpr Bound() = default;
  Bound(Rational v) : kind_(Kind::Finite), value_(v) {}  // NOLINT(google-explicit-constructor)
  Bound(int64_t v) : kind_(Kind::Finite), value_(v) {}   // NOLINT(google-explicit-constructor)
  static Bound neg_inf() { return Bound(Kind::NegInf); }
  static Bound pos_inf() { return Bound(Kind::PosInf); }
  static Bound parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  const Rational& value() const { return value_; }

  Bound operator-() const;

  friend bool operator==(const Bound& a, const Bound& b);
  friend std::strong_ordering operator<=>(const Bound& a, const Bound& b);

  std::string str() const;

 private:
  explicit Bound(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Finite;
  Rational value_;
};

}  // namespace thesee

template <>
struct std::hash<thesee::Rational> {
  size_t operator()(const thesee::Rational& r) const { return r.hash(); }
};
