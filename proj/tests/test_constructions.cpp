#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "aew/constructions.hpp"
#include "aew/core.hpp"
#include "aew/stats.hpp"

using namespace aew;

namespace {

// Independent binomial enumeration using the pmf recurrence instead of
// log-gamma; cross-checks the lattice operations.
double recurrence_tail_mass(int n, double p, const std::vector<char>& event_by_k) {
    double pmf = std::pow(1.0 - p, n);  // k = 0
    double total = event_by_k[0] ? pmf : 0.0;
    for (int k = 0; k < n; ++k) {
        pmf *= (static_cast<double>(n - k) / static_cast<double>(k + 1)) * p / (1.0 - p);
        if (event_by_k[static_cast<std::size_t>(k) + 1]) total += pmf;
    }
    return total;
}

}  // namespace

TEST_CASE("theorem-a model: parameters and validation") {
    const TheoremAModel m = TheoremAModel::create(100);  // risk model allows even n
    CHECK(m.p_plus == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.alpha == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(m.pl2 == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(m.sigma2 == doctest::Approx(0.96).epsilon(1e-15));
    CHECK(m.alpha * m.pl2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(TheoremAModel::create(3), std::invalid_argument);

    Rng rng = make_rng(1);
    CHECK_THROWS_AS(theorem_a_sample(TheoremAModel::create(100), rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(theorem_a_exact_expected_excess(100, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(theorem_a_exact_tail(100, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("theorem-a sampler: first and second moments") {
    const TheoremAModel model = TheoremAModel::create(101);
    Rng rng = make_rng(42);
    double sum = 0.0;
    long long total = 0;
    const Dictionary dict = theorem_a_dictionary(model);
    while (total < 1'000'000) {
        for (const Observation& obs : theorem_a_sample(model, rng)) {
            sum += obs.x;
            ++total;
            CHECK(obs.y == 0.0);
        }
    }
    const double mean = sum / static_cast<double>(total);
    CHECK(mean == doctest::Approx(-2.0 / std::sqrt(101.0)).epsilon(0.02));

    // excess-loss identity: f2^2 - f1^2 = -x on the support
    for (double x : {-1.0, 1.0}) {
        const double f1 = dict.functions[0](x);
        const double f2 = dict.functions[1](x);
        CHECK(f2 * f2 - f1 * f1 == -x);
    }
}

TEST_CASE("theorem-a theta1") {
    CHECK(theorem_a_theta1(0.0, 100, 1.0) == 0.5);
    CHECK(theorem_a_theta1(1e9, 100, 1.0) == 1.0);
    CHECK(theorem_a_theta1(-1e9, 100, 1.0) == 0.0);
    CHECK(theorem_a_theta1(0.02, 100, 1.0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-14));
    // extreme exponents stay finite
    CHECK(std::isfinite(theorem_a_theta1(-1.0, 10000, 1e-6)));
}

TEST_CASE("theorem-a excess: endpoints and sign change") {
    const TheoremAModel m = TheoremAModel::create(100);
    CHECK(theorem_a_excess(1.0, m) == 0.0);
    CHECK(theorem_a_excess(0.0, m) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(theorem_a_excess(0.5, m) == doctest::Approx(-0.15).epsilon(1e-12));
    CHECK_THROWS_AS(theorem_a_excess(1.5, m), std::invalid_argument);
}

TEST_CASE("theorem-a exact expectation: frozen cold-temperature fixture") {
    // At T -> 0 the expectation is P[S > 0] * 2/sqrt(n). For n = 9 (p = 1/6)
    // the tail is sum_{k>=5} C(9,k) 5^{9-k} / 6^9 = 90196 / 10077696.
    const double oracle = (90196.0 / 10077696.0) * (2.0 / 3.0);
    CHECK(theorem_a_exact_expected_excess(9, 1e-8) ==
          doctest::Approx(oracle).epsilon(1e-12));
    CHECK(theorem_a_exact_expected_excess(9, 1e-6) ==
          doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("theorem-a exact expectation: positive at low temperature") {
    for (int n : {101, 1001}) CHECK(theorem_a_exact_expected_excess(n, 0.1) > 0.0);
}

TEST_CASE("theorem-a exact vs Monte Carlo") {
    const int n = 101;
    const double t = 0.1;
    const double exact = theorem_a_exact_expected_excess(n, t);
    const TheoremAModel model = TheoremAModel::create(n);
    Rng rng = make_rng(2024);
    std::vector<double> excess(20000);
    for (double& e : excess) {
        long long plus = 0;
        for (int i = 0; i < n; ++i)
            if (uniform01(rng) < model.p_plus) ++plus;
        const double pnl2 = -(2.0 * plus - n) / static_cast<double>(n);
        e = theorem_a_excess(theorem_a_theta1(pnl2, n, t), model);
    }
    const MeanStderr ms = mean_stderr(excess);
    CHECK(std::abs(ms.mean - exact) <= 3.0 * ms.stderr_);
}

TEST_CASE("theorem-a exact tail: trivial thresholds and recurrence oracle") {
    const int n = 101;
    const TheoremAModel model = TheoremAModel::create(n);
    CHECK(theorem_a_exact_tail(n, 1.0, model.pl2 + 1.0) == 0.0);
    CHECK(theorem_a_exact_tail(n, 1.0, -std::numeric_limits<double>::infinity()) ==
          doctest::Approx(1.0).epsilon(1e-12));

    const double thr = 0.5 / std::sqrt(static_cast<double>(n));
    const double tail = theorem_a_exact_tail(n, 1.0, thr);
    CHECK(tail >= 0.001);

    // independent pmf recurrence over the same event set
    std::vector<char> event(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double pnl2 = -(2.0 * k - n) / static_cast<double>(n);
        event[static_cast<std::size_t>(k)] =
            theorem_a_excess(theorem_a_theta1(pnl2, n, 1.0), model) >= thr;
    }
    CHECK(tail == doctest::Approx(recurrence_tail_mass(n, model.p_plus, event))
                      .epsilon(1e-10));
}

TEST_CASE("theorem-b model: parameter validation") {
    CHECK_THROWS_AS(TheoremBModel::create(1000, 0.2, 1.0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(TheoremBModel::create(1000, 0.1, 1.0, 0.05, 2),
                    std::invalid_argument);  // M < 3
    CHECK_THROWS_AS(TheoremBModel::create(1000, 0.1, 1.0, 0.05, std::nullopt, 0.7),
                    std::invalid_argument);  // lambda >= 1/2
    const TheoremBModel m = TheoremBModel::create(1000, 0.1, 1.0, 0.05);
    CHECK(m.m == 84);
    CHECK(m.rho == doctest::Approx(1e-6).epsilon(1e-9));
    CHECK(m.rho < 0.5);
    CHECK(m.delta > 0.0);
    CHECK(m.bound == doctest::Approx(std::sqrt(12.0)).epsilon(1e-15));
}

TEST_CASE("theorem-b sampler: (U+lambda)^2 is uniform, W is standardized") {
    const TheoremBModel model = TheoremBModel::create(2000, 0.1, 1.0, 0.05);
    Rng rng = make_rng(9);
    std::vector<double> v;
    v.reserve(1'100'000);
    while (v.size() < 1'000'000) {
        const ValueMatrix values = theorem_b_sample(model, rng);
        for (std::size_t i = 0; i < values.rows && v.size() < 1'100'000; ++i) {
            const double t = values.at(i, 1) / std::pow(12.0, 0.25);  // U + lambda
            v.push_back(t * t);
            CHECK(values.at(i, 1) >= 0.0);
            CHECK(values.at(i, 1) <= std::pow(12.0, 0.25) + 1e-12);
        }
    }
    std::sort(v.begin(), v.end());
    double ks = 0.0;
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double hi = static_cast<double>(i + 1) / static_cast<double>(v.size());
        const double lo = static_cast<double>(i) / static_cast<double>(v.size());
        ks = std::max(ks, std::max(std::abs(hi - v[i]), std::abs(lo - v[i])));
        const double w = std::sqrt(12.0) * (v[i] - 0.5);
        m1 += w;
        m2 += w * w;
        m3 += w * w * w;
    }
    const double inv = 1.0 / static_cast<double>(v.size());
    CHECK(ks < 0.002);
    CHECK(std::abs(m1 * inv) < 0.01);
    CHECK(std::abs(m2 * inv - 1.0) < 0.01);
    CHECK(std::abs(m3 * inv) < 0.01);
}

TEST_CASE("theorem-b risk model: oracle, excess gap, degenerate limit") {
    const TheoremBModel model = TheoremBModel::create(1000, 0.1, 1.0, 0.05);
    const RiskModel rm = theorem_b_risk_model(model);
    const double lam = model.lambda;
    for (int j = 1; j < model.m; ++j) {
        CHECK(rm.vertex_risk(0) < rm.vertex_risk(static_cast<std::size_t>(j)));
        CHECK(rm.at(static_cast<std::size_t>(j), static_cast<std::size_t>(j)) ==
              doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    }
    const double gap = rm.vertex_risk(1) - rm.vertex_risk(0);
    CHECK(gap == doctest::Approx(std::sqrt(12.0) * lam * (4.0 / 3.0 - lam)).epsilon(1e-12));
    CHECK(gap >= std::sqrt(12.0) * (4.0 / 3.0 - 0.5) * lam);

    // lambda -> 0: the gap closes continuously
    const TheoremBModel tiny = TheoremBModel::create(1000, 0.1, 1.0, 0.05, std::nullopt, 1e-9);
    const RiskModel rm0 = theorem_b_risk_model(tiny);
    CHECK(rm0.vertex_risk(1) - rm0.vertex_risk(0) ==
          doctest::Approx(0.0).epsilon(1e-7));

    // positive semidefinite on sampled directions (gram = diag + rank-one)
    Rng rng = make_rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        WeightVector dir;
        dir.theta.resize(rm.m);
        for (double& x : dir.theta) x = 2.0 * uniform01(rng) - 1.0;
        double quad = 0.0;
        for (std::size_t j = 0; j < rm.m; ++j)
            for (std::size_t k = 0; k < rm.m; ++k)
                quad += dir.theta[j] * rm.at(j, k) * dir.theta[k];
        CHECK(quad >= -1e-10);
    }
}

TEST_CASE("system_cj_indices: constructed instances and exclusivity") {
    const TheoremBModel model = TheoremBModel::create(1000, 0.1, 1.0, 0.05);
    std::vector<double> rbar(static_cast<std::size_t>(model.m), 1e6);
    rbar[0] = 0.0;
    CHECK(system_cj_indices(rbar, model).empty());

    // hand-built satisfying instance at j = 2 (0-based index 1)
    const double xi = theorem_b_xi(model, rbar[0]);
    rbar[1] = xi - 1.0;
    for (std::size_t k = 2; k < rbar.size(); ++k) rbar[k] = rbar[1] + model.delta + 1.0;
    const std::vector<std::size_t> sat = system_cj_indices(rbar, model);
    REQUIRE(sat.size() == 1);
    CHECK(sat[0] == 1);

    // random vectors: never more than one qualifying index
    Rng rng = make_rng(8);
    for (int rep = 0; rep < 300; ++rep) {
        for (std::size_t j = 0; j < rbar.size(); ++j)
            rbar[j] = 4.0 * (uniform01(rng) - 0.5);
        CHECK(system_cj_indices(rbar, model).size() <= 1);
    }
}

TEST_CASE("bernstein dictionary: exact moments and the (1,B) inequality") {
    Rng rng = make_rng(123);
    const BernsteinModel model = bernstein_dictionary(50, 1.0, rng);
    CHECK(model.m == 50);
    CHECK(model.pieces == 64);
    CHECK(model.excess[0] == 0.0);
    CHECK(model.bernstein_b >= 1.0);
    CHECK(model.bernstein_b <= 4.0 * model.bound * model.bound);

    const double sigma2 = model.noise * model.noise;
    for (int j = 1; j < model.m; ++j) {
        const double d = model.excess[static_cast<std::size_t>(j)];
        CHECK(d > 0.0);
        // E L^2 = E f^4 + 4 sigma^2 E f^2 with |f| constant = sqrt(d)
        const double second_moment = d * d + 4.0 * sigma2 * d;
        CHECK(second_moment <= model.bernstein_b * d * (1.0 + 1e-12));
        // risk model diagonal carries the same excess
        CHECK(model.risk_model.vertex_risk(static_cast<std::size_t>(j)) -
                  model.risk_model.vertex_risk(0) ==
              doctest::Approx(d).epsilon(1e-14));
    }
    // exact orthogonality of distinct sign patterns
    for (int j = 0; j < model.m; ++j)
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int p = 0; p < model.pieces; ++p)
                dot += model.value(static_cast<std::size_t>(j), static_cast<std::size_t>(p)) *
                       model.value(static_cast<std::size_t>(k), static_cast<std::size_t>(p));
            CHECK(dot == 0.0);
        }
    // zero-sum rows: E f_j = 0
    for (int j = 1; j < model.m; ++j) {
        double s = 0.0;
        for (int p = 0; p < model.pieces; ++p)
            s += model.value(static_cast<std::size_t>(j), static_cast<std::size_t>(p));
        CHECK(s == 0.0);
    }
}

TEST_CASE("bernstein dictionary: sampled losses within bound, MC matches analytic") {
    Rng rng = make_rng(321);
    const BernsteinModel model = bernstein_dictionary(12, 1.0, rng);
    const Dictionary dict = make_dictionary(model);
    const std::size_t target = 11;  // largest excess
    const double expect = model.excess[target];

    const int draws = 1'000'000;
    std::vector<double> losses(static_cast<std::size_t>(draws));
    Rng sample_rng = make_rng(654);
    const std::vector<Observation> sample = bernstein_sample(model, draws, sample_rng);
    double max_loss = 0.0;
    for (int i = 0; i < draws; ++i) {
        const Observation& obs = sample[static_cast<std::size_t>(i)];
        const double r1 = obs.y - dict.functions[0](obs.x);
        const double rj = obs.y - dict.functions[target](obs.x);
        losses[static_cast<std::size_t>(i)] = rj * rj - r1 * r1;
        max_loss = std::max(max_loss, std::max(rj * rj, r1 * r1));
    }
    CHECK(max_loss <= model.bound + 1e-12);
    const MeanStderr ms = mean_stderr(losses);
    CHECK(std::abs(ms.mean - expect) <= 3.0 * ms.stderr_);
}

TEST_CASE("bernstein dictionary: edge sizes") {
    Rng rng = make_rng(5);
    const BernsteinModel tiny = bernstein_dictionary(2, 1.0, rng);
    CHECK(tiny.excess[1] == doctest::Approx(0.5625).epsilon(1e-12));
    CHECK_THROWS_AS(bernstein_dictionary(1, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(bernstein_dictionary(10, -1.0, rng), std::invalid_argument);
    const BernsteinModel wide = bernstein_dictionary(100, 1.0, rng);
    CHECK(wide.pieces == 128);
}
