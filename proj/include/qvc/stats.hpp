#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qvc {

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// -sum p log2 p with 0 log 0 = 0.  Probabilities may be unnormalized only
// within tolerance; callers validate distributions upstream.
inline double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("shannon_entropy: negative probability");
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion at z standard deviations.
inline WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                                      double z = 3.0) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be positive");
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction otherwise.  Double precision, adequate for chi-square p-values.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace detail

// P-value of a chi-square statistic with the given degrees of freedom.
inline double chi_square_pvalue(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return 1.0 - detail::gamma_p(dof / 2.0, statistic / 2.0);
}

// Pearson chi-square test of observed counts against expected probabilities.
// Returns the p-value; dof = categories - 1.
inline double chi_square_test(std::span<const std::int64_t> observed,
                              std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_test: size mismatch");
  std::int64_t total = 0;
  for (auto c : observed) total += c;
  if (total <= 0) throw std::invalid_argument("chi_square_test: empty sample");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double e = expected_probs[i] * static_cast<double>(total);
    if (e <= 0.0) throw std::invalid_argument("chi_square_test: zero expected count");
    double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
  }
  return chi_square_pvalue(stat, static_cast<int>(observed.size()) - 1);
}

// Wald-Wolfowitz runs test on a bit string; two-sided p-value via the
// normal approximation.
inline double runs_test_pvalue(std::span<const std::uint8_t> bits) {
  std::int64_t n0 = 0, n1 = 0;
  for (auto b : bits) (b ? n1 : n0) += 1;
  if (n0 == 0 || n1 == 0) return 0.0;
  std::int64_t runs = 1;
  for (std::size_t i = 1; i < bits.size(); ++i)
    if ((bits[i] != 0) != (bits[i - 1] != 0)) ++runs;
  double n = static_cast<double>(n0 + n1);
  double mu = 2.0 * static_cast<double>(n0) * static_cast<double>(n1) / n + 1.0;
  double var = (mu - 1.0) * (mu - 2.0) / (n - 1.0);
  if (var <= 0.0) return 1.0;
  double z = (static_cast<double>(runs) - mu) / std::sqrt(var);
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

}  // namespace qvc
