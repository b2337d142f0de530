#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace lipgrid {

// GMP keeps mpq_class canonical (lowest terms, positive denominator) after
// every arithmetic operation.
using Rational = mpq_class;
using BigInt = mpz_class;
using RationalPoint = std::vector<Rational>;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

// Accepts "p/q", "p" and plain decimals such as "0.125" or "-3.5e-2".
Rational parse_rational(const std::string& text);

// Always "p/q", also for integers.
std::string to_string(const Rational& q);

double to_double(const Rational& q);
Rational from_double(double x);  // exact

BigInt floor_of(const Rational& q);
BigInt ceil_of(const Rational& q);
bool is_integer(const Rational& q);
Rational pow(const Rational& q, unsigned exponent);
BigInt pow(const BigInt& b, unsigned exponent);
std::int64_t to_int64(const BigInt& z);  // throws when out of range

// Exact sum of binary64 values. Every finite double is an integer multiple of
// 2^-1074, so the running total is kept as a scaled big integer.
class ExactSum {
 public:
  void add(double x);
  void add(const ExactSum& other);
  Rational value() const;
  bool empty() const { return count_ == 0; }

 private:
  BigInt scaled_;
  std::size_t count_ = 0;
};

}  // namespace lipgrid
