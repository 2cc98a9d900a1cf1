#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace pst {

using Rational = boost::rational<std::int64_t>;

// Accepts integers ("-3"), fractions ("1/10") and plain decimals ("0.25").
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Extended-real interaction value: an exact rational or the symbolic +inf.
class Energy {
 public:
  Energy() = default;
  Energy(Rational value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Energy(std::int64_t value) : value_(value) {}  // NOLINT(google-explicit-constructor)

  static Energy infinite() {
    Energy e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  // Finite part; throws for +inf.
  const Rational& value() const;

  Energy& operator+=(const Energy& other);
  friend Energy operator+(Energy a, const Energy& b) { return a += b; }

  friend bool operator==(const Energy& a, const Energy& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const Energy& a, const Energy& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator>(const Energy& a, const Energy& b) { return b < a; }
  friend bool operator<=(const Energy& a, const Energy& b) { return !(b < a); }
  friend bool operator>=(const Energy& a, const Energy& b) { return !(a < b); }

 private:
  Rational value_{0};
  bool infinite_ = false;
};

Energy parse_energy(std::string_view text);  // "inf" and "+inf" map to +inf
std::string to_string(const Energy& e);

}  // namespace pst
