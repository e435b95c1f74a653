#include "aew/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aew {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kSqrt12 = 3.4641016151377545870548926830117;

double empirical_cdf(const std::vector<double>& sorted, double x) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

std::vector<double> draw_sorted(const NormalizedSumSpec& spec, std::size_t mc_samples,
                                Rng& rng) {
    std::vector<double> v(mc_samples);
    for (double& x : v) x = spec.draw(rng);
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p outside (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> gaussian_tail_sandwich(double x) {
    if (!(x >= 2.0))
        throw std::invalid_argument("gaussian_tail_sandwich: defined for x >= 2 only");
    const double density = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return {0.75 * density / x, density / x};
}

double irwin_hall_cdf(int m, double t) {
    if (m < 1 || m > 60)
        throw std::invalid_argument("irwin_hall_cdf: m must be in [1, 60]");
    if (t <= 0.0) return 0.0;
    if (t >= static_cast<double>(m)) return 1.0;
    if (t > 0.5 * m) return 1.0 - irwin_hall_cdf(m, static_cast<double>(m) - t);

    // (1/m!) sum_k (-1)^k C(m,k) (t-k)^m, scaled by the largest log term.
    const double lfact = std::lgamma(m + 1.0);
    const int kmax = static_cast<int>(t);
    std::vector<double> logs(static_cast<std::size_t>(kmax) + 1,
                             -std::numeric_limits<double>::infinity());
    double peak = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kmax; ++k) {
        const double d = t - k;
        if (d <= 0.0) continue;
        logs[static_cast<std::size_t>(k)] = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                                            std::lgamma(m - k + 1.0) + m * std::log(d) -
                                            lfact;
        peak = std::max(peak, logs[static_cast<std::size_t>(k)]);
    }
    long double sum = 0.0L;
    for (int k = 0; k <= kmax; ++k) {
        const double lg = logs[static_cast<std::size_t>(k)];
        if (!std::isfinite(lg)) continue;
        const long double term = expl(static_cast<long double>(lg - peak));
        sum += (k & 1) ? -term : term;
    }
    const long double value = expl(static_cast<long double>(peak)) * sum;
    return std::clamp(static_cast<double>(value), 0.0, 1.0);
}

double irwin_hall_quantile(int m, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("irwin_hall_quantile: p outside (0,1)");
    double lo = 0.0, hi = static_cast<double>(m);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (irwin_hall_cdf(m, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double NormalizedSumSpec::draw_summand(Rng& rng) const {
    switch (kind) {
        case SummandKind::uniform_based:
            return kSqrt12 * (uniform01(rng) - 0.5);
        case SummandKind::rademacher_shifted: {
            const double s = uniform01(rng) < shift_p ? 1.0 : -1.0;
            return (s - (2.0 * shift_p - 1.0)) /
                   std::sqrt(4.0 * shift_p * (1.0 - shift_p));
        }
        case SummandKind::gaussian:
            return standard_normal(rng);
        case SummandKind::custom:
            return sampler(rng);
    }
    throw std::logic_error("draw_summand: bad kind");
}

double NormalizedSumSpec::draw(Rng& rng) const {
    double s = 0.0;
    for (int i = 0; i < inner_n; ++i) s += draw_summand(rng);
    return s / std::sqrt(static_cast<double>(inner_n));
}

NormalizedSumSpec NormalizedSumSpec::uniform_based(int inner_n, double berry_a) {
    NormalizedSumSpec s;
    s.kind = SummandKind::uniform_based;
    s.inner_n = inner_n;
    s.abs_third_moment = 3.0 * std::sqrt(3.0) / 4.0;  // uniform on [-sqrt 3, sqrt 3]
    s.berry_a = berry_a;
    s.lattice = false;
    s.third_central_zero = true;
    return s;
}

NormalizedSumSpec NormalizedSumSpec::rademacher_shifted(int inner_n, double p,
                                                        double berry_a) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("rademacher_shifted: p outside (0,1)");
    NormalizedSumSpec s;
    s.kind = SummandKind::rademacher_shifted;
    s.inner_n = inner_n;
    s.abs_third_moment = ((1.0 - p) * (1.0 - p) + p * p) / std::sqrt(p * (1.0 - p));
    s.berry_a = berry_a;
    s.lattice = true;
    s.third_central_zero = p == 0.5;
    s.shift_p = p;
    return s;
}

NormalizedSumSpec NormalizedSumSpec::gaussian(int inner_n) {
    NormalizedSumSpec s;
    s.kind = SummandKind::gaussian;
    s.inner_n = inner_n;
    s.abs_third_moment = 1.5957691216057307117597842397375;  // 2 sqrt(2/pi)
    s.lattice = false;
    s.third_central_zero = true;
    return s;
}

NormalizedSumSpec NormalizedSumSpec::custom(int inner_n,
                                            std::function<double(Rng&)> sampler,
                                            double abs_third_moment, bool lattice,
                                            bool third_central_zero, double berry_a) {
    NormalizedSumSpec s;
    s.kind = SummandKind::custom;
    s.inner_n = inner_n;
    s.sampler = std::move(sampler);
    s.abs_third_moment = abs_third_moment;
    s.lattice = lattice;
    s.third_central_zero = third_central_zero;
    s.berry_a = berry_a;
    return s;
}

BerryEsseenResult berry_esseen_distance(const NormalizedSumSpec& spec,
                                        std::size_t mc_samples, Rng& rng) {
    if (mc_samples < 100'000)
        throw std::invalid_argument("berry_esseen_distance: need >= 1e5 samples");
    if (spec.inner_n < 1) throw std::invalid_argument("berry_esseen_distance: inner_n < 1");
    const std::vector<double> v = draw_sorted(spec, mc_samples, rng);
    const double inv_n = 1.0 / static_cast<double>(mc_samples);
    double dist = 0.0;
    // The sup of |step - continuous| over the jump points, from both sides.
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double phi = normal_cdf(v[i]);
        dist = std::max(dist, std::abs(static_cast<double>(i + 1) * inv_n - phi));
        dist = std::max(dist, std::abs(static_cast<double>(i) * inv_n - phi));
    }
    const double lo = v.front() - 0.5, hi = v.back() + 0.5;
    for (int g = 0; g <= 10'000; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / 10'000.0;
        dist = std::max(dist, std::abs(empirical_cdf(v, x) - normal_cdf(x)));
    }
    return {dist, spec.beta() / std::sqrt(static_cast<double>(spec.inner_n))};
}

double gamma1(const Gamma1Query& query, Rng* rng, std::size_t mc_samples) {
    if (query.ell < 1) throw std::invalid_argument("gamma1: ell must be >= 1");
    if (query.level_n < 2) throw std::invalid_argument("gamma1: level_n must be >= 2");
    if (query.spec.lattice)
        throw unsupported_distribution("gamma1: needs an absolutely continuous summand");
    const double log_n = std::log(static_cast<double>(query.level_n));
    const double tail = std::exp(-log_n / static_cast<double>(query.ell));
    const double p = 1.0 - tail;

    if (query.spec.kind == SummandKind::gaussian) return normal_quantile(p);
    if (query.spec.kind == SummandKind::uniform_based && query.spec.inner_n <= 60) {
        const int m = query.spec.inner_n;
        const double s = irwin_hall_quantile(m, p);
        return kSqrt12 / std::sqrt(static_cast<double>(m)) * (s - 0.5 * m);
    }
    if (rng == nullptr)
        throw std::invalid_argument("gamma1: Monte Carlo path requires an rng");
    std::vector<double> v(mc_samples);
    for (double& x : v) x = query.spec.draw(*rng);
    std::size_t rank =
        static_cast<std::size_t>(std::ceil(p * static_cast<double>(mc_samples)));
    rank = std::clamp<std::size_t>(rank, 1, mc_samples);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
    return v[rank - 1];
}

Part1Check lemma_gamma1_part1(long long ell, long long level_n) {
    if (ell < 1 || level_n < 2)
        throw std::invalid_argument("lemma_gamma1_part1: need ell >= 1, level_n >= 2");
    Part1Check c;
    c.x = std::log(static_cast<double>(level_n)) / static_cast<double>(ell);
    const double tail = std::exp(-c.x);
    c.applicable = c.x <= 1.0;
    c.left = 1.0 - c.x <= tail;
    c.right = c.applicable && tail <= 1.0 - c.x / 3.0;
    return c;
}

LemmaGamma1Report lemma_gamma1_checks(const Gamma1Query& query, Rng* rng,
                                      std::size_t mc_samples) {
    LemmaGamma1Report rep;
    const double log_n = std::log(static_cast<double>(query.level_n));
    const double x = log_n / static_cast<double>(query.ell);
    const Part1Check p1 = lemma_gamma1_part1(query.ell, query.level_n);
    rep.tail_prob = std::exp(-x);
    rep.part1_applicable = p1.applicable;
    rep.part1_left = p1.left;
    rep.part1_right = p1.right;
    rep.premise2 =
        query.spec.beta() / std::sqrt(static_cast<double>(query.spec.inner_n)) + x <
        normal_cdf(-2.0);
    rep.gamma1_value = gamma1(query, rng, mc_samples);
    rep.gamma1_le_minus2 = rep.gamma1_value <= -2.0;
    const double arg = static_cast<double>(query.ell) / log_n;
    if (arg > 1.0 && std::log(arg) > 0.0) {
        rep.part3_ratio = std::abs(rep.gamma1_value) / std::sqrt(std::log(arg));
        rep.part3_in_window = rep.part3_ratio >= 0.25 && rep.part3_ratio <= 4.0;
    }
    return rep;
}

EnvelopeReport moderate_deviation_envelope(const NormalizedSumSpec& spec,
                                           std::span<const double> x_grid,
                                           std::size_t mc_samples, Rng& rng, double b0) {
    if (spec.lattice)
        throw unsupported_distribution(
            "moderate_deviation_envelope: lattice summands violate the envelope");
    if (!spec.third_central_zero)
        throw std::invalid_argument("moderate_deviation_envelope: needs E W^3 = 0");
    const std::vector<double> v = draw_sorted(spec, mc_samples, rng);
    const double limit = b0 * std::pow(static_cast<double>(spec.inner_n), 1.0 / 6.0);
    EnvelopeReport rep;
    for (double x : x_grid) {
        EnvelopePoint pt;
        pt.x = x;
        pt.included = std::abs(x) <= limit;
        if (pt.included) {
            const double dev = std::abs(empirical_cdf(v, x) - normal_cdf(x));
            pt.ratio = dev * std::sqrt(static_cast<double>(spec.inner_n)) /
                       std::exp(-0.5 * x * x);
            rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
        } else {
            ++rep.excluded;
        }
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace aew
