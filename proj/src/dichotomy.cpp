#include "lipgrid/dichotomy.hpp"

#include <algorithm>
#include <cmath>

#include "lipgrid/errors.hpp"
#include "odometer.hpp"

namespace lipgrid {

namespace {

constexpr int kMaxEnlargements = 10000;

long double as_ld(const BigInt& z) { return static_cast<long double>(mpz_get_d(z.get_mpz_t())); }

long double translation_slack(const DichotomyParams& p, double theta) {
  long double d = p.d;
  return p.eps - (4.0L * p.L * std::sqrt(d) * std::pow(static_cast<long double>(theta), 1.0L / (2.0L * d)) + theta +
                  2.0L * p.L / as_ld(p.N0));
}

long double stretch_slack(const DichotomyParams& p, const BigInt& lower_M) {
  long double phi = p.phi;
  long double L2 = static_cast<long double>(p.L) * p.L;
  return phi - 2.0L * (1.0L + 2.0L * phi) * L2 / as_ld(p.N0) - 2.0L * L2 * as_ld(lower_M) / as_ld(p.M);
}

}  // namespace

DichotomyParams params_1d(double L, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0,1)");
  if (!(L >= 1.0)) throw PreconditionError("bilipschitz constant L must be at least 1");
  DichotomyParams p;
  p.d = 1;
  p.L = L;
  p.eps = eps;
  p.t = eps * eps / (45.0 * L * L);
  long double ratio = 6.0L * L / eps;
  // Guard the ceiling against representation noise of eps (6/0.3 etc.).
  double m = static_cast<double>(std::ceil(ratio * (1.0L - 1e-15L)));
  if (!std::isfinite(m)) throw PreconditionError("eps too small for the one-dimensional parameters");
  mpz_set_d(p.M.get_mpz_t(), std::max(m, 1.0));
  p.phi = eps * p.t / (2.0 * (6.0 - eps));
  p.N0 = 2;
  auto bad = params_violations(p);
  if (!bad.empty()) throw InvariantError("one-dimensional parameters violate: " + bad.front());
  return p;
}

DichotomyParams params_nd(int d, double L, double eps) {
  if (d < 1) throw PreconditionError("dimension must be positive");
  if (d == 1) return params_1d(L, eps);
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0,1)");
  if (!(L >= 1.0)) throw PreconditionError("bilipschitz constant L must be at least 1");
  double theta = std::min(eps * eps, std::pow(eps / (12.0 * L * std::sqrt(static_cast<double>(d))), 2.0 * d));
  if (!(theta > 0.0)) throw PreconditionError("theta underflows for these parameters");
  DichotomyParams below = params_nd(d - 1, L, theta);

  DichotomyParams p;
  p.d = d;
  p.L = L;
  p.eps = eps;
  p.t = below.t;
  p.M = below.M;
  p.phi = below.phi / 4.0;
  p.N0 = std::max(below.N0, BigInt(2));
  p.theta_chain.push_back(theta);
  p.theta_chain.insert(p.theta_chain.end(), below.theta_chain.begin(), below.theta_chain.end());
  p.lower = below.lower;
  p.lower.push_back(LevelParams{below.d, below.eps, below.M, below.phi, below.N0});

  int rounds = 0;
  while (true) {
    bool ok = true;
    if (translation_slack(p, theta) <= 0) {
      p.N0 *= 2;
      ok = false;
    }
    long double phi = p.phi;
    long double L2 = static_cast<long double>(L) * L;
    if (2.0L * (1.0L + 2.0L * phi) * L2 / as_ld(p.N0) >= phi / 2.0L) {
      p.N0 *= 2;
      ok = false;
    }
    if (2.0L * L2 * as_ld(below.M) / as_ld(p.M) >= phi / 2.0L) {
      p.M *= 2;
      ok = false;
    }
    if (ok) break;
    if (++rounds > kMaxEnlargements) throw InvariantError("parameter enlargement did not converge");
  }
  auto bad = params_violations(p);
  if (!bad.empty()) throw InvariantError("parameters violate: " + bad.front());
  return p;
}

std::vector<std::string> params_violations(const DichotomyParams& p) {
  std::vector<std::string> bad;
  if (p.d == 1) {
    if (!(std::sqrt(5.0 * p.t) * p.L + 2.0 * p.L / mpz_get_d(p.M.get_mpz_t()) < p.eps))
      bad.push_back("sqrt(5t)L + 2L/M < eps");
    if (!(6.0 * p.phi / (p.phi + p.t) < p.eps)) bad.push_back("6phi/(phi+t) < eps");
    if (!(p.phi < p.t)) bad.push_back("phi < t");
    return bad;
  }
  if (p.lower.empty() || p.theta_chain.empty()) {
    bad.push_back("missing lower-dimensional parameters");
    return bad;
  }
  const LevelParams& below = p.lower.back();
  double theta = p.theta_chain.front();
  if (!(1.0 - std::sqrt(theta) >= 1.0 - p.eps)) bad.push_back("1 - sqrt(theta) >= 1 - eps");
  if (!(translation_slack(p, theta) > 0)) bad.push_back("4L sqrt(d) theta^(1/2d) + theta + 2L/N0 < eps");
  if (!(stretch_slack(p, below.M) > 0)) bad.push_back("stretch inequality with slack phi");
  if (p.M % below.M != 0) bad.push_back("M is a multiple of the lower M");
  if (!(p.phi < below.phi / 2.0)) bad.push_back("phi < phi_lower / 2");
  if (p.N0 < below.N0) bad.push_back("N0 >= lower N0");
  return bad;
}

BigInt iteration_bound(double L, double phi) {
  if (!(L >= 1.0)) throw PreconditionError("L must be at least 1");
  if (!(phi > 0.0 && phi < 1.0)) throw PreconditionError("phi must lie in (0,1)");
  long double x = 2.0L * std::log(static_cast<long double>(L)) / std::log1p(static_cast<long double>(phi));
  long double fl = std::floor(x);
  BigInt r;
  mpz_set_d(r.get_mpz_t(), static_cast<double>(fl));
  r += 1;
  if (r > 4096) return r;
  // Settle the boundary exactly: r is the least integer with (1+phi)^r > L^2.
  Rational base = 1 + from_double(phi);
  Rational target = from_double(L) * from_double(L);
  auto exceeds = [&](const BigInt& k) { return pow(base, static_cast<unsigned>(k.get_ui())) > target; };
  while (!exceeds(r)) r += 1;
  while (r > 1 && exceeds(r - 1)) r -= 1;
  return r;
}

bool certify_bilipschitz(const SampledMap& h, double L, double rel_tol) {
  const std::size_t n = h.vertex_count();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = distance(h.vertex_ptr(i), h.vertex_ptr(j), h.dim());
      double dy = distance(h.value_ptr(i), h.value_ptr(j), h.out_dim());
      if (dy > L * dx * (1.0 + rel_tol)) return false;
      if (dy * L < dx * (1.0 - rel_tol)) return false;
    }
  return true;
}

namespace {

Rational squared_norm_of_difference(const SampledMap& h, std::size_t a, std::size_t b) {
  Rational s = 0;
  for (std::size_t r = 0; r < h.out_dim(); ++r) {
    Rational diff = from_double(h.value_ptr(a)[r]) - from_double(h.value_ptr(b)[r]);
    s += diff * diff;
  }
  return s;
}

}  // namespace

ProbeVerdict dichotomy_probe(const SampledMap& h, const Rational& c, const DichotomyParams& params, std::int64_t N,
                             double eps) {
  if (N < 2) throw PreconditionError("probe needs N >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0,1)");
  const GridSpec& g = h.grid();
  if (g.cell_centered) throw PreconditionError("probe needs vertex samples");
  const std::size_t d = g.dim();
  if (static_cast<int>(d) != params.d) throw PreconditionError("map dimension differs from the parameters");
  std::int64_t M = to_int64(params.M);
  const std::int64_t K = N * M;
  if ((g.counts[0] - 1) % K != 0) throw PreconditionError("grid spacing does not divide c/(NM)");
  const std::int64_t k = (g.counts[0] - 1) / K;
  const double cd = to_double(c);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  if (!close(g.lower[0], 0.0) || !close(g.upper[0], cd)) throw PreconditionError("first axis must span [0,c]");
  for (std::size_t a = 1; a < d; ++a) {
    if (g.counts[a] - 1 != M * k) throw PreconditionError("grid spacing differs between axes");
    if (!close(g.lower[a], 0.0) || !close(g.upper[a], cd / static_cast<double>(N)))
      throw PreconditionError("transverse axes must span [0,c/N]");
  }
  if (!certify_bilipschitz(h, params.L)) throw PreconditionError("map is not L-bilipschitz on its samples");

  std::vector<std::int64_t> origin(d, 0), end_e1(d, 0);
  end_e1[0] = g.counts[0] - 1;
  const std::size_t i0 = h.grid_flat(origin);
  const std::size_t i1 = h.grid_flat(end_e1);
  const Rational mean_sq = squared_norm_of_difference(h, i1, i0);  // |h(c e1) - h(0)|^2
  const Rational one_phi = 1 + from_double(params.phi);
  const Rational threshold = one_phi * one_phi * mean_sq;
  const Rational K2 = Rational(BigInt(static_cast<long>(K))) * Rational(BigInt(static_cast<long>(K)));

  // Statement 2: some lattice step along e1 stretches more than (1+phi) times the mean.
  std::vector<std::int64_t> j(d, 0);
  std::vector<std::int64_t> last(d, M - 1);
  last[0] = K - 1;
  do {
    std::vector<std::int64_t> a(d);
    for (std::size_t ax = 0; ax < d; ++ax) a[ax] = j[ax] * k;
    std::vector<std::int64_t> b = a;
    b[0] += k;
    Rational step_sq = squared_norm_of_difference(h, h.grid_flat(b), h.grid_flat(a));
    if (step_sq * K2 > threshold) {
      Statement2 s;
      s.lattice_index = j;
      Rational unit = c / Rational(BigInt(static_cast<long>(K)));
      for (std::size_t ax = 0; ax < d; ++ax) s.z.push_back(unit * Rational(BigInt(static_cast<long>(j[ax]))));
      s.ratio = mean_sq == 0 ? INFINITY : std::sqrt(to_double(step_sq * K2 / mean_sq));
      return s;
    }
  } while (detail::next_index(j, std::vector<std::int64_t>(d, 0), last));

  // Statement 1: translation by c/N e1 is close to adding the mean increment.
  std::vector<Rational> mean_inc(h.out_dim());
  for (std::size_t r = 0; r < h.out_dim(); ++r)
    mean_inc[r] = (from_double(h.value_ptr(i1)[r]) - from_double(h.value_ptr(i0)[r])) /
                  Rational(BigInt(static_cast<long>(N)));
  const Rational tol = c * from_double(eps) / Rational(BigInt(static_cast<long>(N)));
  const Rational tol_sq = tol * tol;
  const std::int64_t slab = M * k;
  Statement1 result;
  for (std::int64_t s = 1; s <= N - 1; ++s) {
    std::vector<std::int64_t> lo(d, 0), hi(d, slab);
    lo[0] = (s - 1) * slab;
    hi[0] = s * slab;
    std::vector<std::int64_t> x = lo;
    bool good = true;
    do {
      std::vector<std::int64_t> y = x;
      y[0] += slab;
      std::size_t ix = h.grid_flat(x), iy = h.grid_flat(y);
      Rational dev = 0;
      for (std::size_t r = 0; r < h.out_dim(); ++r) {
        Rational v = from_double(h.value_ptr(iy)[r]) - from_double(h.value_ptr(ix)[r]) - mean_inc[r];
        dev += v * v;
      }
      good = dev <= tol_sq;
    } while (good && detail::next_index(x, lo, hi));
    if (good) result.omega.push_back(s);
  }
  Rational needed = (1 - from_double(eps)) * Rational(BigInt(static_cast<long>(N - 1)));
  if (Rational(BigInt(static_cast<long>(result.omega.size()))) >= needed) return result;
  throw InconclusiveProbe("neither statement holds on the samples (" + std::to_string(result.omega.size()) +
                              " good slabs of " + std::to_string(N - 1) + ")",
                          result.omega);
}

}  // namespace lipgrid
