#include "pst/energy.hpp"

#include <charconv>
#include <limits>

#include "pst/error.hpp"

namespace pst {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t v = 0;
  auto begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || begin == text.data() + text.size())
    throw Error(errc::kParse, "not a number: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw Error(errc::kParse, "empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_int(text.substr(0, slash), text);
    auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw Error(errc::kParse, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    bool negative = !text.empty() && text.front() == '-';
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    if (frac_part.size() > 15) throw Error(errc::kParse, "too many decimals in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    std::int64_t whole = 0;
    if (!int_part.empty() && int_part != "-" && int_part != "+") whole = parse_int(int_part, text);
    std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part, text);
    if (frac < 0) throw Error(errc::kParse, "malformed decimal '" + std::string(text) + "'");
    std::int64_t magnitude = (whole < 0 ? -whole : whole) * scale + frac;
    return Rational(negative ? -magnitude : magnitude, scale);
  }
  return Rational(parse_int(text, text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

const Rational& Energy::value() const {
  if (infinite_) throw Error(errc::kInadmissible, "finite part requested of +inf");
  return value_;
}

Energy& Energy::operator+=(const Energy& other) {
  if (infinite_ || other.infinite_) {
    infinite_ = true;
    value_ = 0;
  } else {
    value_ += other.value_;
  }
  return *this;
}

Energy parse_energy(std::string_view text) {
  if (text == "inf" || text == "+inf") return Energy::infinite();
  return Energy(parse_rational(text));
}

std::string to_string(const Energy& e) { return e.is_infinite() ? "inf" : to_string(e.value()); }

}  // namespace pst
