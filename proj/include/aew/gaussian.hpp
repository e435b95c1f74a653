#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aew/rng.hpp"

namespace aew {

struct unsupported_distribution : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Standard normal CDF via erfc; absolute error well under 1e-12.
double normal_cdf(double x);
// Inverse of normal_cdf by bisection (sufficient accuracy for quantile work).
double normal_quantile(double p);

// For x >= 2: (3/(4 sqrt(2 pi))) e^{-x^2/2}/x <= P[g >= x] <= (1/sqrt(2 pi)) e^{-x^2/2}/x.
std::pair<double, double> gaussian_tail_sandwich(double x);

// CDF of the sum of m independent uniforms on [0,1], exact alternating sum
// evaluated in extended precision; m <= 60 keeps cancellation harmless.
double irwin_hall_cdf(int m, double t);
double irwin_hall_quantile(int m, double p);

// Distribution of the normalized sum Xbar = n^{-1/2} sum_{i<=inner_n} W_i.
enum class SummandKind {
    uniform_based,       // W = sqrt(12)(V - 1/2), V uniform on [0,1]
    rademacher_shifted,  // W = (S - (2p-1)) / sqrt(4p(1-p)), S = +-1 w.p. p / 1-p
    gaussian,            // W standard normal (Xbar exactly standard normal)
    custom,
};

struct NormalizedSumSpec {
    SummandKind kind = SummandKind::uniform_based;
    int inner_n = 1;
    double abs_third_moment = 0.0;  // E|W|^3
    double berry_a = 0.56;          // admissible Berry-Esseen constant
    bool lattice = false;
    bool third_central_zero = false;  // E W^3 == 0
    std::function<double(Rng&)> sampler;  // required for custom

    double beta() const { return berry_a * abs_third_moment; }
    double draw_summand(Rng& rng) const;
    double draw(Rng& rng) const;  // one Xbar sample

    static NormalizedSumSpec uniform_based(int inner_n, double berry_a = 0.56);
    static NormalizedSumSpec rademacher_shifted(int inner_n, double p = 0.5,
                                                double berry_a = 0.56);
    static NormalizedSumSpec gaussian(int inner_n);
    static NormalizedSumSpec custom(int inner_n, std::function<double(Rng&)> sampler,
                                    double abs_third_moment, bool lattice,
                                    bool third_central_zero, double berry_a = 0.56);

private:
    double shift_p = 0.5;  // rademacher_shifted parameter
};

struct BerryEsseenResult {
    double distance = 0.0;  // sup over grid + empirical jump points of |F_hat - Phi|
    double bound = 0.0;     // A E|W|^3 / sqrt(inner_n)
};

BerryEsseenResult berry_esseen_distance(const NormalizedSumSpec& spec,
                                        std::size_t mc_samples, Rng& rng);

struct Gamma1Query {
    long long ell = 1;      // number of independent copies of Xbar
    long long level_n = 2;  // the n in P[min <= gamma1] = 1 - 1/n
    NormalizedSumSpec spec;
};

// The level q = 1 - n^{-1/ell} quantile of Xbar, i.e. the unique gamma1 with
// P[Xbar > gamma1] = n^{-1/ell}. Exact for the gaussian kind and for
// uniform_based with inner_n <= 60 (Irwin-Hall); Monte Carlo otherwise
// (an rng is then required). Lattice specs are rejected: the defining
// equation needs a density.
double gamma1(const Gamma1Query& query, Rng* rng = nullptr,
              std::size_t mc_samples = 10'000'000);

// Pure arithmetic on x = (log n)/ell: left inequality 1 - x <= n^{-1/ell}
// always holds; the right one n^{-1/ell} <= 1 - x/3 needs x <= 1.
struct Part1Check {
    double x = 0.0;
    bool applicable = false;  // x <= 1
    bool left = false;
    bool right = false;
};

Part1Check lemma_gamma1_part1(long long ell, long long level_n);

struct LemmaGamma1Report {
    double gamma1_value = 0.0;
    double tail_prob = 0.0;  // n^{-1/ell}
    bool part1_applicable = false;  // (log n)/ell <= 1
    bool part1_left = false;        // 1 - (log n)/ell <= n^{-1/ell}
    bool part1_right = false;       // n^{-1/ell} <= 1 - (log n)/(3 ell)
    bool premise2 = false;          // beta/sqrt(inner_n) + (log n)/ell < P[g < -2]
    bool gamma1_le_minus2 = false;
    double part3_ratio = 0.0;  // |gamma1| / sqrt(log(ell / log n)), evaluated when defined
    bool part3_in_window = false;  // ratio in [1/4, 4]
};

LemmaGamma1Report lemma_gamma1_checks(const Gamma1Query& query, Rng* rng = nullptr,
                                      std::size_t mc_samples = 10'000'000);

struct EnvelopePoint {
    double x = 0.0;
    double ratio = 0.0;  // |F_hat(x) - Phi(x)| / (inner_n^{-1/2} e^{-x^2/2})
    bool included = false;
};

struct EnvelopeReport {
    std::vector<EnvelopePoint> points;
    double max_ratio = 0.0;
    std::size_t excluded = 0;  // grid points outside |x| <= B0 inner_n^{1/6}
};

// Moderate-deviation envelope check; requires E W^3 = 0 and a density
// (lattice specs are rejected).
EnvelopeReport moderate_deviation_envelope(const NormalizedSumSpec& spec,
                                           std::span<const double> x_grid,
                                           std::size_t mc_samples, Rng& rng,
                                           double b0 = 1.0);

}  // namespace aew
