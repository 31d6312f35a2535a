#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace switchlens {

/// Exact non-negative-friendly fraction, always stored in lowest terms with a
/// positive denominator. Supports and confidences are ratios of record counts,
/// so every comparison in the miners goes through this type.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);
  // NOLINTNEXTLINE(google-explicit-constructor)
  Rational(std::int64_t whole) : Rational(whole, 1) {}

  /// Accepts "3/5", "0.6", "1", "1.0". Throws ParseError.
  static Rational parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  /// Integer percentage, halves rounded up.
  std::int64_t percent_half_up() const;

  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace switchlens
