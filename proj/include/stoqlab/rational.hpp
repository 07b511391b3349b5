#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace stoqlab {

// Exact arithmetic backend for squared quantities (branch weights, acceptance
// probabilities). Amplitudes themselves are generally irrational; every exact
// computation in this codebase is phrased so that only squared magnitudes and
// pairwise products with a shared scale appear.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat pow2_rat(int e) {
  Rat r = e >= 0 ? Rat(mpz_class(1) << e, 1) : Rat(1, mpz_class(1) << (-e));
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

// Largest dyadic s/2^bits that does not exceed x. Returns (numerator, value).
struct Dyadic {
  long num = 0;
  int bits = 0;
  Rat value() const { return Rat(num, mpz_class(1) << bits); }
};

inline Dyadic dyadic_floor(double x, int bits) {
  Dyadic d;
  d.bits = bits;
  double scaled = x * static_cast<double>(1ULL << bits);
  d.num = static_cast<long>(scaled);
  if (static_cast<double>(d.num) > scaled) --d.num;
  if (d.num < 0) d.num = 0;
  return d;
}

inline std::optional<Dyadic> as_exact_dyadic(const Rat& x, int max_bits = 62) {
  Rat r = x;
  r.canonicalize();
  mpz_class den = r.get_den();
  int bits = 0;
  while (den > 1) {
    if (mpz_even_p(den.get_mpz_t()) == 0) return std::nullopt;
    den >>= 1;
    if (++bits > max_bits) return std::nullopt;
  }
  if (!r.get_num().fits_slong_p()) return std::nullopt;
  return Dyadic{r.get_num().get_si(), bits};
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace stoqlab
