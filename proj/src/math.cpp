// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/math.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "simulst/errors.hpp"

namespace simulst {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_below requires n > 0");
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Regularized incomplete gamma via the classic series / continued-fraction
// split (Numerical Recipes gser/gcf).
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

static double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ArgumentError("gamma_p requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_sf(double stat, double dof) {
  if (dof <= 0.0) throw ArgumentError("chi2_sf requires dof > 0");
  if (stat <= 0.0) return 1.0;
  double a = 0.5 * dof;
  double x = 0.5 * stat;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi2_uniform_pvalue(const std::vector<double>& samples, double lo, double hi,
                           std::size_t bins) {
  if (samples.empty()) throw ArgumentError("chi2_uniform_pvalue requires samples");
  if (bins < 2) throw ArgumentError("chi2_uniform_pvalue requires >= 2 bins");
  if (!(hi > lo)) throw ArgumentError("chi2_uniform_pvalue requires hi > lo");
  std::vector<std::size_t> counts(bins, 0);
  for (double s : samples) {
    if (s < lo || s > hi) throw ArgumentError("sample outside [lo, hi]");
    auto b = static_cast<std::size_t>((s - lo) / (hi - lo) * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;  // s == hi lands in the last bin
    ++counts[b];
  }
  double expected = static_cast<double>(samples.size()) / static_cast<double>(bins);
  double stat = 0.0;
  for (std::size_t c : counts) {
    double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return chi2_sf(stat, static_cast<double>(bins - 1));
}

}  // namespace simulst
