#include "aew/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aew {

namespace {

void require_positive_r(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("complexity: r must be finite and > 0");
}

// #{delta in (lo, hi]} over the sorted profile.
std::size_t count_in(const std::vector<double>& deltas, double lo, double hi) {
    const auto a = std::upper_bound(deltas.begin(), deltas.end(), lo);
    const auto b = std::upper_bound(deltas.begin(), deltas.end(), hi);
    return static_cast<std::size_t>(b - a);
}

std::size_t count_le(const std::vector<double>& deltas, double r) {
    return static_cast<std::size_t>(
        std::upper_bound(deltas.begin(), deltas.end(), r) - deltas.begin());
}

int natural_j_max(const ExcessRiskProfile& profile, double r) {
    const double dmax = profile.deltas.back();
    if (dmax <= r) return 0;
    return static_cast<int>(std::ceil(std::log2(dmax / r))) + 1;
}

// Bucket log-counts L_j for j = 0..j_max.
std::vector<double> bucket_logs(const ExcessRiskProfile& profile, double r, int j_max) {
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(j_max) + 1);
    logs.push_back(std::log(static_cast<double>(count_le(profile.deltas, r)) + 1.0));
    double lo = r;
    for (int j = 1; j <= j_max; ++j) {
        const double hi = std::ldexp(r, j);  // 2^j r
        logs.push_back(std::log(static_cast<double>(count_in(profile.deltas, lo, hi)) + 1.0));
        lo = hi;
    }
    return logs;
}

struct USums {
    double linear = 0.0;  // L_0 + sum 2^{-j} L_j
    double root = 0.0;    // sqrt(L_0) + sum 2^{-j/2} sqrt(L_j)
};

USums u_sums(const ExcessRiskProfile& profile, double r) {
    const std::vector<double> logs = bucket_logs(profile, r, natural_j_max(profile, r));
    USums s;
    s.linear = logs[0];
    s.root = std::sqrt(logs[0]);
    for (std::size_t j = 1; j < logs.size(); ++j) {
        s.linear += std::ldexp(logs[j], -static_cast<int>(j));
        s.root += std::exp2(-0.5 * static_cast<double>(j)) * std::sqrt(logs[j]);
    }
    return s;
}

double u_from_sums(const ExcessRiskProfile& profile, int n, double r, const USums& s,
                   double c1) {
    return c1 * (profile.b / static_cast<double>(n)) * s.linear +
           c1 * std::sqrt(profile.bernstein_b * r / static_cast<double>(n)) * s.root;
}

}  // namespace

ExcessRiskProfile ExcessRiskProfile::create(std::vector<double> deltas, double b,
                                            double bernstein_b) {
    if (deltas.empty()) throw std::invalid_argument("profile: empty");
    if (!std::is_sorted(deltas.begin(), deltas.end()))
        throw std::invalid_argument("profile: deltas must be sorted non-decreasing");
    if (deltas.front() != 0.0)
        throw std::invalid_argument("profile: oracle excess deltas[0] must be 0");
    for (double d : deltas)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw std::invalid_argument("profile: excess risks must be finite and >= 0");
    if (!(b > 0.0) || !(bernstein_b > 0.0))
        throw std::invalid_argument("profile: b and B must be > 0");
    return {std::move(deltas), b, bernstein_b};
}

ComplexityReport psi(const ExcessRiskProfile& profile, double r,
                     std::optional<int> j_max_override) {
    require_positive_r(r);
    int j_max = natural_j_max(profile, r);
    if (j_max_override) j_max = std::max(j_max, *j_max_override);
    ComplexityReport report;
    report.r = r;
    report.bucket_counts[0] = count_le(profile.deltas, r);
    report.psi_value = std::log(static_cast<double>(report.bucket_counts[0]) + 1.0);
    double lo = r;
    for (int j = 1; j <= j_max; ++j) {
        const double hi = std::ldexp(r, j);
        const std::size_t c = count_in(profile.deltas, lo, hi);
        report.bucket_counts[j] = c;
        report.psi_value += std::ldexp(std::log(static_cast<double>(c) + 1.0), -j);
        lo = hi;
    }
    return report;
}

double u_of_r(const ExcessRiskProfile& profile, int n, double r,
              const Constants& constants) {
    require_positive_r(r);
    if (n < 1) throw std::invalid_argument("u_of_r: n must be >= 1");
    return u_from_sums(profile, n, r, u_sums(profile, r), constants.c1_u);
}

double r_bar(const ExcessRiskProfile& profile, int n, const Constants& constants) {
    if (n < 1) throw std::invalid_argument("r_bar: n must be >= 1");
    const double c1 = constants.c1_u;
    const double m_plus_1 = static_cast<double>(profile.size()) + 1.0;
    double hi = 8.0 * constants.rbar_bracket * (profile.b + profile.bernstein_b) *
                std::log(m_plus_1) / static_cast<double>(n);

    // u(r) >= c1 (b/n) log 2 for every r, so no crossing exists below r_floor.
    const double r_floor = 2.0 * c1 * profile.b * std::log(2.0) / static_cast<double>(n);

    for (int widen = 0; widen <= 20; ++widen, hi *= 2.0) {
        if (r_floor >= hi) continue;
        if (u_of_r(profile, n, hi, constants) > hi / 2.0) continue;

        // Breakpoints of the bucket structure inside [r_floor, hi]: each
        // positive excess d changes a count at r = d / 2^k.
        std::vector<double> brk;
        brk.push_back(r_floor);
        brk.push_back(hi);
        for (double d : profile.deltas) {
            if (d <= 0.0) continue;
            for (double t = d; t > r_floor; t *= 0.5)
                if (t < hi) brk.push_back(t);
        }
        std::sort(brk.begin(), brk.end());
        brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

        for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
            const double lo = brk[i];
            const double next = brk[i + 1];
            // Counts are constant on [lo, next): u(r) = A + C sqrt(r) there.
            const USums s = u_sums(profile, lo);
            const double a = c1 * (profile.b / static_cast<double>(n)) * s.linear;
            const double c =
                c1 * std::sqrt(profile.bernstein_b / static_cast<double>(n)) * s.root;
            if (u_from_sums(profile, n, lo, s, c1) <= lo / 2.0) return lo;
            // Solve s^2/2 - C s - A >= 0 for s = sqrt(r).
            const double root = c + std::sqrt(c * c + 2.0 * a);
            const double r_star = root * root;
            if (r_star >= lo && r_star < next) return r_star;
        }
        return hi;
    }
    throw std::runtime_error("r_bar: no crossing of u(r) <= r/2 found after widening");
}

double lambda_x(const ExcessRiskProfile& profile, int n, double x,
                const Constants& constants) {
    if (!(x > 0.0)) throw std::invalid_argument("lambda_x: x must be > 0");
    const double tail = (profile.b + profile.bernstein_b) * x / static_cast<double>(n);
    return constants.lambda_c * std::max(r_bar(profile, n, constants), tail);
}

double K0Partition::two_pow_k0() const {
    return k0 ? std::ldexp(1.0, *k0) : 0.0;
}

K0Partition k0_partition(const ExcessRiskProfile& profile, int n, double x,
                         const Constants& constants) {
    K0Partition part;
    part.lambda = lambda_x(profile, n, x, constants);
    part.rho =
        constants.kappa1 * (profile.bernstein_b + profile.b) / static_cast<double>(n);
    std::vector<std::size_t> j_plus_all;
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (profile.deltas[j] <= part.lambda)
            part.j_minus.push_back(j);
        else
            j_plus_all.push_back(j);
    }
    const double dmax = profile.deltas.back();
    int k_max = 0;
    if (dmax > part.rho)
        k_max = static_cast<int>(std::ceil(std::log2(dmax / part.rho))) + 1;
    part.j_plus.assign(static_cast<std::size_t>(k_max) + 1, {});
    for (std::size_t j : j_plus_all) {
        const double d = profile.deltas[j];
        int k = 0;
        if (d > part.rho) {
            k = std::max(1, static_cast<int>(std::ceil(std::log2(d / part.rho))));
            // guards against log2 rounding at bucket boundaries
            while (std::ldexp(part.rho, k) < d) ++k;
            while (k > 1 && std::ldexp(part.rho, k - 1) >= d) --k;
        }
        if (k >= static_cast<int>(part.j_plus.size()))
            part.j_plus.resize(static_cast<std::size_t>(k) + 1);
        part.j_plus[static_cast<std::size_t>(k)].push_back(j);
    }
    part.k0 = std::nullopt;
    for (std::size_t k = 0; k < part.j_plus.size(); ++k) {
        const double count = static_cast<double>(part.j_plus[k].size());
        if (std::ldexp(1.0, static_cast<int>(k)) <= std::log(count + 1.0))
            part.k0 = static_cast<int>(k);
    }
    return part;
}

double pac_bound_residual(const ExcessRiskProfile& profile, int n, double temperature,
                          double x, const Constants& constants) {
    if (!(temperature > 0.0)) throw std::invalid_argument("pac_bound: T must be > 0");
    if (!(x > 0.0)) throw std::invalid_argument("pac_bound: x must be > 0");
    double sum = 0.0;
    const double scale = static_cast<double>(n) / (2.0 * temperature);
    for (double d : profile.deltas) sum += std::exp(-scale * d);
    return (temperature * constants.c2_pac / static_cast<double>(n)) *
           (x + std::log(sum));
}

double key_estimate_bound(const ExcessRiskProfile& profile, int n, double x,
                          double temperature, const Constants& constants) {
    (void)temperature;  // regime checked by callers via low_temperature()
    const K0Partition part = k0_partition(profile, n, x, constants);
    return constants.c2_key *
           (part.lambda +
            (profile.b + profile.bernstein_b) * part.two_pow_k0() / static_cast<double>(n));
}

bool low_temperature(double temperature, double b, double bernstein_b,
                     const Constants& constants) {
    return temperature <= constants.c0_temp * std::max(b, bernstein_b);
}

}  // namespace aew
