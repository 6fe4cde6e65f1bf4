// Copyright (c) 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace simulst {

/// splitmix64 finalizer; good avalanche, stable across platforms.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over bytes.
std::uint64_t fnv1a(std::string_view bytes);

/// Double in [0, 1) from the engine's next 53 bits. Used instead of
/// std::uniform_real_distribution, whose output is implementation-defined;
/// manifests built from this are byte-identical on any platform.
double uniform01(std::mt19937_64& rng);

/// Integer in [0, n) by rejection sampling; platform-stable.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// Fisher-Yates shuffle driven by uniform_below; platform-stable.
template <typename Vec>
void deterministic_shuffle(Vec& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Survival function of the chi-squared distribution: P(X > stat) for
/// `dof` degrees of freedom.
double chi2_sf(double stat, double dof);

/// Pearson chi-squared uniformity test over equal-width bins. Returns the
/// p-value for the hypothesis that `samples` are uniform on [lo, hi].
double chi2_uniform_pvalue(const std::vector<double>& samples, double lo, double hi,
                           std::size_t bins);

}  // namespace simulst
