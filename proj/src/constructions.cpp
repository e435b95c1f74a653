#include "aew/constructions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aew {

namespace {

constexpr double kRoot12 = 3.4641016151377545870548926830117;  // sqrt(12)
constexpr double kQuartic12 = 1.8612097182041991394695549331973;  // 12^{1/4}

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void require_odd(int n, const char* who) {
    if (n % 2 == 0)
        throw std::invalid_argument(std::string(who) + ": n must be odd and >= 5");
}

}  // namespace

TheoremAModel TheoremAModel::create(int n) {
    if (n < 5) throw std::invalid_argument("theorem-a model: n must be >= 5");
    const double root_n = std::sqrt(static_cast<double>(n));
    TheoremAModel m;
    m.n = n;
    m.p_plus = 0.5 - 1.0 / root_n;
    m.alpha = root_n / 2.0;
    m.pl2 = 2.0 / root_n;
    m.sigma2 = 1.0 - 4.0 / static_cast<double>(n);
    return m;
}

std::vector<Observation> theorem_a_sample(const TheoremAModel& model, Rng& rng) {
    require_odd(model.n, "theorem_a_sample");
    std::vector<Observation> sample(static_cast<std::size_t>(model.n));
    for (Observation& obs : sample) {
        obs.x = uniform01(rng) < model.p_plus ? 1.0 : -1.0;
        obs.y = 0.0;
    }
    return sample;
}

Dictionary theorem_a_dictionary(const TheoremAModel& model) {
    Dictionary dict;
    dict.functions.push_back([](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; });
    dict.functions.push_back([](double x) { return x >= -1.0 && x <= 0.0 ? 1.0 : 0.0; });
    dict.bound = 1.0;
    RiskModel rm;
    rm.m = 2;
    rm.gram = {model.p_plus, 0.0, 0.0, 1.0 - model.p_plus};
    rm.cross = {0.0, 0.0};
    rm.y2 = 0.0;
    dict.risk_model = rm;
    return dict;
}

double theorem_a_theta1(double pnl2, int n, double temperature) {
    if (temperature <= 0.0) throw std::invalid_argument("theta1: T must be > 0");
    const double z = (static_cast<double>(n) / temperature) * pnl2;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double theorem_a_excess(double theta1, const TheoremAModel& model) {
    if (!(theta1 >= 0.0 && theta1 <= 1.0))
        throw std::invalid_argument("theorem_a_excess: theta1 outside [0,1]");
    return (1.0 - theta1 - model.alpha * theta1 * (1.0 - theta1)) * model.pl2;
}

namespace {

// Shared enumeration over S = sum X_i = 2k - n, k ~ Binomial(n, p_plus).
template <typename Accumulate>
void theorem_a_enumerate(int n, double temperature, Accumulate&& acc) {
    const TheoremAModel model = TheoremAModel::create(n);
    const double lp = std::log(model.p_plus);
    const double lq = std::log1p(-model.p_plus);
    for (int k = 0; k <= n; ++k) {
        const double pmf = std::exp(log_choose(n, k) + k * lp + (n - k) * lq);
        const double s = 2.0 * k - static_cast<double>(n);
        const double pnl2 = -s / static_cast<double>(n);
        const double theta1 = theorem_a_theta1(pnl2, n, temperature);
        acc(pmf, theorem_a_excess(theta1, model));
    }
}

}  // namespace

double theorem_a_lattice_mean(int n, double temperature) {
    double total = 0.0;
    theorem_a_enumerate(n, temperature,
                        [&](double pmf, double excess) { total += pmf * excess; });
    return total;
}

double theorem_a_lattice_tail(int n, double temperature, double threshold) {
    double total = 0.0;
    theorem_a_enumerate(n, temperature, [&](double pmf, double excess) {
        if (excess >= threshold) total += pmf;
    });
    return total;
}

double theorem_a_exact_expected_excess(int n, double temperature) {
    require_odd(n, "theorem_a_exact_expected_excess");
    return theorem_a_lattice_mean(n, temperature);
}

double theorem_a_exact_tail(int n, double temperature, double threshold) {
    require_odd(n, "theorem_a_exact_tail");
    return theorem_a_lattice_tail(n, temperature, threshold);
}

TheoremBModel TheoremBModel::create(int n, double epsilon, double kappa,
                                    double temperature, std::optional<int> m_override,
                                    std::optional<double> lambda_override, double c_m) {
    if (n < 3) throw std::invalid_argument("theorem-b model: n too small");
    if (temperature <= 0.0) throw std::invalid_argument("theorem-b model: T must be > 0");
    if (kappa <= 0.0) throw std::invalid_argument("theorem-b model: kappa must be > 0");
    const double logn = std::log(static_cast<double>(n));
    const double eps_floor = temperature / std::sqrt(n * logn);
    if (!(epsilon > eps_floor && epsilon < 0.125))
        throw std::invalid_argument("theorem-b model: epsilon outside (T/sqrt(n log n), 1/8)");

    TheoremBModel m;
    m.n = n;
    m.epsilon = epsilon;
    m.kappa = kappa;
    m.temperature = temperature;
    m.m = m_override ? *m_override
                     : static_cast<int>(std::ceil(c_m * std::sqrt(n * logn)));
    if (m.m < 3) throw std::invalid_argument("theorem-b model: M must be >= 3");
    m.lambda = lambda_override
                   ? *lambda_override
                   : epsilon * std::sqrt(std::log(static_cast<double>(m.m)) / n);
    if (!(m.lambda > 0.0 && m.lambda < 0.5))
        throw std::invalid_argument("theorem-b model: lambda outside (0, 1/2)");
    m.rho = std::exp(-(epsilon * kappa / temperature) * logn);
    if (!(m.rho > 0.0 && m.rho < 0.5))
        throw std::invalid_argument("theorem-b model: rho outside (0, 1/2)");
    m.delta = -(temperature / std::sqrt(static_cast<double>(n))) *
              std::log(m.rho / (2.0 * (m.m - 2) * (1.0 - m.rho)));
    if (!(m.delta > 0.0)) throw std::invalid_argument("theorem-b model: delta <= 0");
    m.bound = kRoot12;
    return m;
}

ValueMatrix theorem_b_sample(const TheoremBModel& model, Rng& rng) {
    ValueMatrix values;
    values.rows = static_cast<std::size_t>(model.n);
    values.cols = static_cast<std::size_t>(model.m);
    values.data.resize(values.rows * values.cols);
    for (std::size_t i = 0; i < values.rows; ++i) {
        for (std::size_t j = 0; j < values.cols; ++j) {
            // (U + lambda)^2 is uniform, so U + lambda = sqrt(V).
            const double root_v = std::sqrt(uniform01(rng));
            values.at(i, j) =
                j == 0 ? kQuartic12 * (root_v - model.lambda) : kQuartic12 * root_v;
        }
    }
    return values;
}

RiskModel theorem_b_risk_model(const TheoremBModel& model) {
    const std::size_t m = static_cast<std::size_t>(model.m);
    const double lam = model.lambda;
    RiskModel rm;
    rm.m = m;
    rm.gram.assign(m * m, 0.0);
    rm.cross.assign(m, 0.0);
    rm.y2 = 0.0;
    std::vector<double> mean(m, kQuartic12 * (2.0 / 3.0));
    mean[0] = kQuartic12 * (2.0 / 3.0 - lam);
    std::vector<double> second(m, kRoot12 / 2.0);
    second[0] = kRoot12 * (0.5 - 4.0 * lam / 3.0 + lam * lam);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k)
            rm.at(j, k) = j == k ? second[j] : mean[j] * mean[k];
    }
    return rm;
}

std::vector<double> theorem_b_rbar(const TheoremBModel& model, const ValueMatrix& values) {
    const std::size_t n = values.rows;
    const std::size_t m = values.cols;
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double t = values.at(i, j) / kQuartic12;  // U + lambda for j >= 1
            if (j == 0) t += model.lambda;            // U1 + lambda
            sums[j] += t * t;
        }
    }
    std::vector<double> rbar(m);
    const double scale = std::sqrt(12.0 / static_cast<double>(n));
    for (std::size_t j = 0; j < m; ++j)
        rbar[j] = scale * (sums[j] - 0.5 * static_cast<double>(n));
    return rbar;
}

EmpiricalRisks theorem_b_empirical_risks(const TheoremBModel& model,
                                         const ValueMatrix& values) {
    (void)model;
    const std::size_t n = values.rows;
    const std::size_t m = values.cols;
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            sums[j] += values.at(i, j) * values.at(i, j);
    for (double& s : sums) s /= static_cast<double>(n);
    return {std::move(sums), n};
}

double theorem_b_xi(const TheoremBModel& model, double rbar1) {
    const double root_n = std::sqrt(static_cast<double>(model.n));
    return rbar1 +
           (model.temperature / root_n) * std::log(model.rho / (2.0 * (1.0 - model.rho))) -
           kRoot12 * model.lambda * (2.0 - model.lambda) * root_n;
}

std::vector<std::size_t> system_cj_indices(std::span<const double> rbar,
                                           const TheoremBModel& model) {
    if (model.m < 3) throw std::invalid_argument("system_cj_indices: M must be >= 3");
    if (rbar.size() != static_cast<std::size_t>(model.m))
        throw std::invalid_argument("system_cj_indices: dimension mismatch");
    // Only the strict minimum over j >= 2 can dominate every other element
    // by delta > 0, so a single candidate needs checking.
    std::size_t jmin = 1;
    for (std::size_t j = 2; j < rbar.size(); ++j)
        if (rbar[j] < rbar[jmin]) jmin = j;
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < rbar.size(); ++j)
        if (j != jmin) second = std::min(second, rbar[j]);
    std::vector<std::size_t> out;
    if (rbar[jmin] <= theorem_b_xi(model, rbar[0]) && second - rbar[jmin] >= model.delta)
        out.push_back(jmin);
    return out;
}

BernsteinModel bernstein_dictionary(int m, double b, Rng& rng) {
    if (m < 2) throw std::invalid_argument("bernstein_dictionary: M must be >= 2");
    if (!(b > 0.0 && b < 16.0))
        throw std::invalid_argument("bernstein_dictionary: need 0 < b < 16");
    BernsteinModel model;
    model.m = m;
    model.bound = b;
    model.noise = b / 4.0;
    const double amax = std::sqrt(b) - model.noise;
    const double dmax = amax * amax;

    // Excess-risk layout (scaled by dmax): a cluster of near-optimal elements
    // well under empirical resolution at any workable n, then a geometric
    // ladder covering roughly thirteen octaves below dmax.
    const double clone_dr = dmax * (1e-8 / 0.5625);
    const double dmin = dmax * (9.6e-5 / 0.5625);
    const int clones = static_cast<int>(std::lround(0.35 * (m - 1)));
    const int ladder = m - 1 - clones;
    model.excess.assign(static_cast<std::size_t>(m), 0.0);
    for (int j = 1; j <= clones; ++j) model.excess[static_cast<std::size_t>(j)] = clone_dr;
    if (ladder == 1) {
        model.excess[static_cast<std::size_t>(m - 1)] = dmax;
    } else {
        const double ratio = std::pow(dmax / dmin, 1.0 / (ladder - 1));
        double d = dmin;
        for (int j = clones + 1; j < m; ++j) {
            model.excess[static_cast<std::size_t>(j)] = std::min(d, dmax);
            d *= ratio;
        }
    }

    // Orthogonal sign patterns: distinct non-zero rows of the 2^k x 2^k
    // Sylvester Hadamard matrix have zero sum and vanishing inner products,
    // which keeps every moment of the dictionary exact.
    std::size_t pieces = 64;
    while (pieces < static_cast<std::size_t>(m)) pieces *= 2;
    model.pieces = static_cast<int>(pieces);
    std::vector<std::size_t> row_ids(pieces - 1);
    for (std::size_t i = 0; i < row_ids.size(); ++i) row_ids[i] = i + 1;
    for (std::size_t i = row_ids.size(); i > 1; --i)
        std::swap(row_ids[i - 1], row_ids[uniform_index(rng, i)]);

    model.values.assign(static_cast<std::size_t>(m) * pieces, 0.0);
    for (int j = 1; j < m; ++j) {
        const double amp = std::sqrt(model.excess[static_cast<std::size_t>(j)]);
        const std::size_t row = row_ids[static_cast<std::size_t>(j - 1)];
        for (std::size_t k = 0; k < pieces; ++k) {
            const bool neg = std::popcount(row & k) & 1u;
            model.values[static_cast<std::size_t>(j) * pieces + k] = neg ? -amp : amp;
        }
    }

    model.bernstein_b = std::max(1.0, dmax + 4.0 * model.noise * model.noise);
    RiskModel rm;
    rm.m = static_cast<std::size_t>(m);
    rm.gram.assign(rm.m * rm.m, 0.0);
    for (int j = 0; j < m; ++j)
        rm.at(static_cast<std::size_t>(j), static_cast<std::size_t>(j)) =
            model.excess[static_cast<std::size_t>(j)];
    rm.cross.assign(rm.m, 0.0);
    rm.y2 = model.noise * model.noise;
    model.risk_model = std::move(rm);
    return model;
}

std::vector<Observation> bernstein_sample(const BernsteinModel& model, int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("bernstein_sample: n must be >= 1");
    std::vector<Observation> sample(static_cast<std::size_t>(n));
    const std::size_t pieces = static_cast<std::size_t>(model.pieces);
    for (Observation& obs : sample) {
        obs.x = uniform01(rng);
        const std::size_t k =
            std::min(pieces - 1, static_cast<std::size_t>(obs.x * static_cast<double>(pieces)));
        obs.y = model.value(0, k) + model.noise * rademacher(rng);
    }
    return sample;
}

Dictionary make_dictionary(const BernsteinModel& model) {
    Dictionary dict;
    const std::size_t pieces = static_cast<std::size_t>(model.pieces);
    for (int j = 0; j < model.m; ++j) {
        std::vector<double> row(model.values.begin() + j * model.pieces,
                                model.values.begin() + (j + 1) * model.pieces);
        dict.functions.push_back([row, pieces](double x) {
            const std::size_t k =
                std::min(pieces - 1, static_cast<std::size_t>(x * static_cast<double>(pieces)));
            return row[k];
        });
    }
    dict.bound = model.bound;
    dict.risk_model = model.risk_model;
    return dict;
}

}  // namespace aew
