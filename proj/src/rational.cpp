#include "switchlens/rational.hpp"

#include <charconv>
#include <numeric>

#include "switchlens/errors.hpp"

namespace switchlens {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational { throw ParseError("invalid rational '" + std::string(text) + "'"); };
  auto parse_int = [&](std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t n = 0, d = 0;
    if (!parse_int(text.substr(0, slash), n) || !parse_int(text.substr(slash + 1), d) || d == 0) return fail();
    return Rational(n, d);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    std::int64_t n = 0;
    if (!parse_int(text, n)) return fail();
    return Rational(n, 1);
  }
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 12) return fail();
  std::int64_t w = 0, f = 0;
  if (!whole.empty() && !parse_int(whole, w)) return fail();
  if (!parse_int(frac, f) || f < 0 || w < 0) return fail();
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  return Rational(w * scale + f, scale);
}

std::string Rational::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

std::int64_t Rational::percent_half_up() const {
  const __int128 scaled = static_cast<__int128>(num_) * 200 + den_;
  const __int128 twice = static_cast<__int128>(den_) * 2;
  __int128 q = scaled / twice;
  if (scaled % twice != 0 && scaled < 0) --q;
  return static_cast<std::int64_t>(q);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("division by zero rational");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

}  // namespace switchlens
