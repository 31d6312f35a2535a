#include <doctest.h>

#include "switchlens/errors.hpp"
#include "switchlens/rational.hpp"
#include "switchlens/time.hpp"

using namespace switchlens;

TEST_CASE("timestamps parse and format at millisecond precision") {
  const auto t = parse_timestamp("2024-03-04T09:15:00Z");
  CHECK(format_timestamp(t) == "2024-03-04T09:15:00.000Z");
  CHECK(to_unix_millis(parse_timestamp("1970-01-01T00:00:01.5Z")) == 1500);
  CHECK(parse_timestamp("2024-03-04T09:15:00+00:00") == t);
  CHECK(format_timestamp(from_unix_millis(to_unix_millis(t) + 7)) == "2024-03-04T09:15:00.007Z");
}

TEST_CASE("malformed timestamps are rejected") {
  for (const char* bad : {"", "2024-03-04", "2024-03-04T09:15:00", "2024-13-04T09:15:00Z", "2024-03-04T25:00:00Z",
                          "2024-03-04T09:15:00+02:00", "2024-03-04T09:15:00.1234Z", "yesterday"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_timestamp(bad), ParseError);
  }
}

TEST_CASE("time of day buckets") {
  CHECK(time_of_day(parse_timestamp("2024-03-04T05:59:59Z")) == TimeOfDay::Evening);
  CHECK(time_of_day(parse_timestamp("2024-03-04T06:00:00Z")) == TimeOfDay::Morning);
  CHECK(time_of_day(parse_timestamp("2024-03-04T11:59:59Z")) == TimeOfDay::Morning);
  CHECK(time_of_day(parse_timestamp("2024-03-04T12:00:00Z")) == TimeOfDay::Afternoon);
  CHECK(time_of_day(parse_timestamp("2024-03-04T18:00:00Z")) == TimeOfDay::Evening);
  // 04:30 UTC is 10:30 at UTC+6, 23:30 the previous day at UTC-5
  CHECK(time_of_day(parse_timestamp("2024-03-04T04:30:00Z"), 360) == TimeOfDay::Morning);
  CHECK(time_of_day(parse_timestamp("2024-03-04T04:30:00Z"), -300) == TimeOfDay::Evening);
}

TEST_CASE("rationals stay in lowest terms") {
  CHECK(Rational(6, 10) == Rational(3, 5));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(2, 4).to_string() == "1/2");
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(2, 5) / Rational(4, 5) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(34, 100));
  CHECK(Rational(1, 2) >= Rational(2, 4));
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("3/5") == Rational(3, 5));
  CHECK(Rational::parse("0.6") == Rational(3, 5));
  CHECK(Rational::parse("1") == Rational(1));
  CHECK(Rational::parse("1.0") == Rational(1));
  CHECK(Rational::parse("0.125") == Rational(1, 8));
  CHECK_THROWS_AS(Rational::parse("abc"), ParseError);
  CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
}

TEST_CASE("percentages round halves up") {
  CHECK(Rational(3, 5).percent_half_up() == 60);
  CHECK(Rational(2, 3).percent_half_up() == 67);
  CHECK(Rational(33, 50).percent_half_up() == 66);
  CHECK(Rational(1, 200).percent_half_up() == 1);
  CHECK(Rational(1, 201).percent_half_up() == 0);
  CHECK(Rational(1).percent_half_up() == 100);
}
