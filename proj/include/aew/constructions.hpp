#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aew/core.hpp"
#include "aew/rng.hpp"

namespace aew {

// ---------------------------------------------------------------------------
// Two-function counterexample: Y = 0, X in {-1,+1} with P[X=1] = 1/2 - 1/sqrt(n),
// f1 = 1_[0,1], f2 = 1_[-1,0]. The oracle is f1; the excess loss of f2 is -X.
// ---------------------------------------------------------------------------
struct TheoremAModel {
    int n;
    double p_plus;  // P[X = +1] = 1/2 - n^{-1/2}
    double alpha;   // E(f1-f2)^2 / E L2 = sqrt(n)/2
    double pl2;     // E L2 = 2 n^{-1/2}
    double sigma2;  // Var L2 = 1 - 4/n

    // Requires n >= 5 so that p_plus > 0. Parity is checked by the sampling
    // and lattice operations, which need it; the risk model itself does not.
    static TheoremAModel create(int n);
};

// n i.i.d. observations (X_i, 0). Rejects even n.
std::vector<Observation> theorem_a_sample(const TheoremAModel& model, Rng& rng);

// Two-element dictionary with the exact risk model attached (usable for any
// n >= 5; the rate-contrast pipeline runs it on even grids).
Dictionary theorem_a_dictionary(const TheoremAModel& model);

// Oracle weight 1/(1 + exp(-(n/T) PnL2)), saturating without overflow.
double theorem_a_theta1(double pnl2, int n, double temperature);

// (1 - theta - alpha theta (1-theta)) * E L2; negative values are possible.
double theorem_a_excess(double theta1, const TheoremAModel& model);

// Exact expectation/tail of the aggregate's excess risk by enumerating the
// binomial lattice S = sum X_i (log-space pmf, no sampling). No parity
// restriction; exposed for grids that include even n.
double theorem_a_lattice_mean(int n, double temperature);
double theorem_a_lattice_tail(int n, double temperature, double threshold);

// Lattice enumeration with the theorem's odd-n requirement enforced
// (odd n keeps S away from 0, which the low-temperature argument needs).
double theorem_a_exact_expected_excess(int n, double temperature);
double theorem_a_exact_tail(int n, double temperature, double threshold);

// ---------------------------------------------------------------------------
// Large-dictionary construction: Y = 0, f1 = 12^{1/4} U1,
// f_j = 12^{1/4}(U_j + lambda), with U having density 2(u+lambda) on
// [-lambda, 1-lambda], so (U+lambda)^2 is uniform on [0,1].
// ---------------------------------------------------------------------------
struct TheoremBModel {
    int n = 0;
    int m = 0;             // dictionary size
    double lambda = 0.0;   // in (0, 1/2)
    double epsilon = 0.0;  // in (0, 1/8)
    double kappa = 1.0;
    double temperature = 0.0;
    double rho = 0.0;    // n^{-eps kappa / T}, must be in (0, 1/2)
    double delta = 0.0;  // -(T/sqrt n) log[rho / (2(M-2)(1-rho))]
    double bound = 0.0;  // sup of the loss: sqrt(12)

    static TheoremBModel create(int n, double epsilon, double kappa,
                                double temperature,
                                std::optional<int> m_override = std::nullopt,
                                std::optional<double> lambda_override = std::nullopt,
                                double c_m = 1.0);
};

struct ValueMatrix {
    std::size_t rows = 0;  // observations
    std::size_t cols = 0;  // dictionary elements
    std::vector<double> data;

    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

// n x M matrix of function values f_j(X_i); U sampled by inverse CDF
// U = sqrt(V) - lambda with V uniform.
ValueMatrix theorem_b_sample(const TheoremBModel& model, Rng& rng);

// Exact moments: E f1^2 = sqrt(12)(1/2 - 4 lambda/3 + lambda^2),
// E f_j^2 = sqrt(3); off-diagonal entries factor through independence.
RiskModel theorem_b_risk_model(const TheoremBModel& model);

// Normalized partial sums sqrt(12/n)(sum_i (U_j+lambda)^2 - n/2) per element.
std::vector<double> theorem_b_rbar(const TheoremBModel& model, const ValueMatrix& values);

// Empirical risks of the trial (quadratic loss against Y = 0).
EmpiricalRisks theorem_b_empirical_risks(const TheoremBModel& model,
                                         const ValueMatrix& values);

// Indices j >= 2 (0-based: >= 1) with Rbar_j <= xi(Rbar_1) and
// Rbar_k - Rbar_j >= delta for every other k >= 2. At most one index can
// qualify when delta > 0.
std::vector<std::size_t> system_cj_indices(std::span<const double> rbar,
                                           const TheoremBModel& model);
double theorem_b_xi(const TheoremBModel& model, double rbar1);

// ---------------------------------------------------------------------------
// Well-specified dictionary for the fast-rate experiments: f1 = 0 is the
// regression function, Y = f1(X) +- noise, the other elements are orthogonal
// sign-pattern step functions on [0,1] whose excess risks cover a geometric
// ladder of scales plus a cluster of near-optimal elements.
// ---------------------------------------------------------------------------
struct BernsteinModel {
    int m = 0;
    int pieces = 0;               // K, a power of two
    std::vector<double> values;   // m x K piecewise-constant values, row-major
    double noise = 0.0;           // sigma_b: Y = +-sigma_b, each w.p. 1/2
    double bound = 0.0;           // b: uniform bound on loss values
    double bernstein_b = 0.0;     // B with E L^2 <= B E L for every element
    std::vector<double> excess;   // exact Delta R_j = E f_j^2
    RiskModel risk_model;         // exact (diagonal gram + y2 = sigma_b^2)

    double value(std::size_t j, std::size_t k) const {
        return values[j * static_cast<std::size_t>(pieces) + k];
    }
};

BernsteinModel bernstein_dictionary(int m, double b, Rng& rng);

// n observations (X uniform on [0,1), Y = f1(X) +- sigma_b).
std::vector<Observation> bernstein_sample(const BernsteinModel& model, int n, Rng& rng);

// Dictionary view (piecewise lookups) for use with the generic operations.
Dictionary make_dictionary(const BernsteinModel& model);

}  // namespace aew
