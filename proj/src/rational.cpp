#include "lipgrid/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "lipgrid/errors.hpp"

namespace lipgrid {

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  Rational q(BigInt(std::to_string(num), 10), BigInt(std::to_string(den), 10));
  q.canonicalize();
  return q;
}

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

Rational parse_decimal(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  long exponent = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    std::string e = s.substr(epos + 1);
    s.resize(epos);
    std::size_t used = 0;
    try {
      exponent = std::stol(e, &used);
    } catch (const std::exception&) {
      throw PreconditionError("malformed rational '" + text + "'");
    }
    if (used != e.size()) throw PreconditionError("malformed rational '" + text + "'");
  }
  std::string digits;
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    digits = s;
  } else {
    std::string frac = s.substr(dot + 1);
    digits = s.substr(0, dot) + frac;
    exponent -= static_cast<long>(frac.size());
  }
  if (!all_digits(digits)) throw PreconditionError("malformed rational '" + text + "'");
  if (exponent > 4000 || exponent < -4000) throw PreconditionError("exponent out of range in '" + text + "'");
  Rational q{BigInt(digits, 10)};
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0) q /= scale; else q *= scale;
  if (negative) q = -q;
  q.canonicalize();
  return q;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  std::string num = text.substr(0, slash);
  std::string den = text.substr(slash + 1);
  std::string num_body = (!num.empty() && (num[0] == '-' || num[0] == '+')) ? num.substr(1) : num;
  if (!all_digits(num_body) || !all_digits(den)) throw PreconditionError("malformed rational '" + text + "'");
  BigInt d(den, 10);
  if (d == 0) throw PreconditionError("rational with zero denominator '" + text + "'");
  Rational q(BigInt(num_body, 10), d);
  if (!num.empty() && num[0] == '-') q = -q;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) {
  // mpq_get_d truncates, so round to nearest-even by hand.
  const BigInt& num = q.get_num();
  const BigInt& den = q.get_den();
  if (num == 0) return 0.0;
  long shift = 55 + static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)) -
               static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  BigInt scaled = abs(num);
  BigInt divisor = den;
  if (shift > 0) scaled <<= static_cast<mp_bitcnt_t>(shift);
  else divisor <<= static_cast<mp_bitcnt_t>(-shift);
  BigInt quotient, remainder;
  mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled.get_mpz_t(), divisor.get_mpz_t());
  bool sticky = remainder != 0;
  long drop = static_cast<long>(mpz_sizeinbase(quotient.get_mpz_t(), 2)) - 53;
  BigInt kept = quotient >> static_cast<mp_bitcnt_t>(drop);
  BigInt low = quotient - (kept << static_cast<mp_bitcnt_t>(drop));
  BigInt half = BigInt(1) << static_cast<mp_bitcnt_t>(drop - 1);
  if (low > half || (low == half && (sticky || mpz_odd_p(kept.get_mpz_t())))) kept += 1;
  double result = std::ldexp(mpz_get_d(kept.get_mpz_t()), static_cast<int>(drop - shift));
  return num < 0 ? -result : result;
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw PreconditionError("non-finite value has no rational form");
  Rational q(x);
  q.canonicalize();
  return q;
}

BigInt floor_of(const Rational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

BigInt ceil_of(const Rational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational pow(const Rational& q, unsigned exponent) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), exponent);
  return Rational(num, den);
}

BigInt pow(const BigInt& b, unsigned exponent) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), exponent);
  return r;
}

std::int64_t to_int64(const BigInt& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) throw PreconditionError("integer " + z.get_str() + " exceeds 64 bits");
  return static_cast<std::int64_t>(z.get_si());
}

void ExactSum::add(double x) {
  if (!std::isfinite(x)) throw PreconditionError("non-finite value in exact sum");
  ++count_;
  if (x == 0.0) return;
  int exp = 0;
  double frac = std::frexp(x, &exp);  // x = frac * 2^exp, |frac| in [0.5, 1)
  auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  long shift = static_cast<long>(exp) - 53 + 1074;
  BigInt term(static_cast<long>(mant));
  if (shift >= 0) {
    term <<= static_cast<mp_bitcnt_t>(shift);
  } else {
    // Only subnormals reach here; their low bits are zero.
    term >>= static_cast<mp_bitcnt_t>(-shift);
  }
  scaled_ += term;
}

void ExactSum::add(const ExactSum& other) {
  scaled_ += other.scaled_;
  count_ += other.count_;
}

Rational ExactSum::value() const {
  BigInt den = BigInt(1) << 1074;
  Rational q(scaled_, den);
  q.canonicalize();
  return q;
}

}  // namespace lipgrid
