#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "aew/constants.hpp"

namespace aew {

// Sorted excess risks of a dictionary, oracle first (deltas[0] == 0), with
// the loss bound b and the Bernstein constant B of the class.
struct ExcessRiskProfile {
    std::vector<double> deltas;
    double b = 1.0;
    double bernstein_b = 1.0;

    std::size_t size() const { return deltas.size(); }
    static ExcessRiskProfile create(std::vector<double> deltas, double b,
                                    double bernstein_b);
};

struct ComplexityReport {
    double psi_value = 0.0;
    // bucket 0: #{Delta R <= r}; bucket j >= 1: #{2^{j-1} r < Delta R <= 2^j r}.
    std::map<int, std::size_t> bucket_counts;
    double r = 0.0;
};

// psi(r) = log(|bucket 0|+1) + sum_{j>=1} 2^{-j} log(|bucket j|+1).
// The series is truncated once 2^{j-1} r exceeds the largest excess risk;
// later buckets are empty and contribute log 1 = 0 exactly.
// j_max_override forces evaluation of additional (empty) buckets.
ComplexityReport psi(const ExcessRiskProfile& profile, double r,
                     std::optional<int> j_max_override = std::nullopt);

// Localized empirical-process ceiling
//   u(r) = c1 (b/n) [L_0 + sum 2^{-j} L_j] + c1 sqrt(B r / n) [sqrt(L_0) + sum 2^{-j/2} sqrt(L_j)]
// with L_j = log(|bucket j| + 1).
double u_of_r(const ExcessRiskProfile& profile, int n, double r,
              const Constants& constants = {});

// Fixed point r_bar = inf{ r > 0 : u(r) <= r/2 }. The bucket counts are step
// functions of r, so the crossing is located segment-by-segment between the
// breakpoints delta/2^k and solved in closed form within each segment.
double r_bar(const ExcessRiskProfile& profile, int n, const Constants& constants = {});

// lambda(x) = c max{ r_bar, (b+B) x / n }.
double lambda_x(const ExcessRiskProfile& profile, int n, double x,
                const Constants& constants = {});

struct K0Partition {
    std::vector<std::size_t> j_minus;               // indices with Delta R <= lambda(x)
    std::vector<std::vector<std::size_t>> j_plus;   // j_plus[k]: bucket k of the complement
    std::optional<int> k0;                          // nullopt encodes sup(empty) = -inf
    double lambda = 0.0;
    double rho = 0.0;                               // kappa1 (b+B)/n

    double two_pow_k0() const;  // 0 when k0 is -inf
};

K0Partition k0_partition(const ExcessRiskProfile& profile, int n, double x,
                         const Constants& constants = {});

// High-temperature residual (T c2/n)(x + log sum_f exp(-(n/2T) Delta R_f)),
// kept as a diagnostic comparison curve.
double pac_bound_residual(const ExcessRiskProfile& profile, int n, double temperature,
                          double x, const Constants& constants = {});

// Low-temperature ceiling c2 (lambda(x) + (b+B) 2^{k0} / n).
double key_estimate_bound(const ExcessRiskProfile& profile, int n, double x,
                          double temperature, const Constants& constants = {});

// True when T is inside the low-temperature regime T <= c0 max{b, B}.
bool low_temperature(double temperature, double b, double bernstein_b,
                     const Constants& constants = {});

}  // namespace aew
