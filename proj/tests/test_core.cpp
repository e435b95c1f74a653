#include <doctest.h>

#include <cmath>
#include <vector>

#include "aew/constructions.hpp"
#include "aew/core.hpp"
#include "aew/rng.hpp"

using namespace aew;

namespace {

WeightVector random_simplex(std::size_t m, Rng& rng) {
    std::vector<double> w(m);
    double sum = 0.0;
    for (double& x : w) {
        x = -std::log(1.0 - uniform01(rng));
        sum += x;
    }
    for (double& x : w) x /= sum;
    return {std::move(w)};
}

Dictionary constant_dictionary(std::vector<double> values) {
    Dictionary d;
    for (double v : values) d.functions.push_back([v](double) { return v; });
    return d;
}

}  // namespace

TEST_CASE("empirical risk: plug-in values") {
    const std::vector<Observation> one = {{3.0, 0.0}};
    const EmpiricalRisks r0 = empirical_risk(constant_dictionary({0.0}), one);
    CHECK(r0.values == std::vector<double>{0.0});
    CHECK(r0.n == 1);

    const std::vector<Observation> ones = {{0.2, 1.0}};
    const EmpiricalRisks r1 = empirical_risk(constant_dictionary({1.0, 0.0}), ones);
    CHECK(r1.values[0] == 0.0);
    CHECK(r1.values[1] == 1.0);
}

TEST_CASE("empirical risk: two-indicator dictionary at x = -1") {
    const TheoremAModel model = TheoremAModel::create(101);
    const Dictionary dict = theorem_a_dictionary(model);
    std::vector<Observation> sample(7, Observation{-1.0, 0.0});
    const EmpiricalRisks r = empirical_risk(dict, sample);
    CHECK(r.values[0] == 0.0);  // f1(-1) = 0
    CHECK(r.values[1] == 1.0);  // f2(-1) = 1
}

TEST_CASE("empirical risk: empty sample rejected") {
    CHECK_THROWS_AS(empirical_risk(constant_dictionary({0.0}), {}),
                    std::invalid_argument);
}

TEST_CASE("aew weights: symmetry, plug-in, errors") {
    const EmpiricalRisks equal{{0.37, 0.37}, 12};
    const WeightVector w = aew_weights(equal, Temperature(0.8));
    CHECK(w.theta[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w.theta[1] == doctest::Approx(0.5).epsilon(1e-15));

    // n=10, T=1, risks (0, 0.1): theta_1 = 1/(1+e^{-1})
    const EmpiricalRisks two{{0.0, 0.1}, 10};
    const WeightVector v = aew_weights(two, Temperature(1.0));
    const double expect = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(v.theta[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(v.theta[1] == doctest::Approx(1.0 - expect).epsilon(1e-12));

    CHECK_THROWS_AS(
        aew_weights({{0.1, std::numeric_limits<double>::quiet_NaN()}, 5}, Temperature(1.0)),
        std::invalid_argument);
    CHECK_THROWS_AS(Temperature(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Temperature(-1.0), std::invalid_argument);
}

TEST_CASE("aew weights: shift invariance") {
    // Dyadic risks and shifts keep the stabilized differences bit-exact.
    const std::vector<double> base = {0.0, 0.5, 1.25, 0.75};
    const WeightVector w0 = aew_weights({base, 20}, Temperature(0.5));
    for (double c : {0.5, 4.0, 1024.0}) {
        std::vector<double> shifted = base;
        for (double& x : shifted) x += c;
        const WeightVector wc = aew_weights({shifted, 20}, Temperature(0.5));
        for (std::size_t j = 0; j < base.size(); ++j) CHECK(wc.theta[j] == w0.theta[j]);
    }
    // Generic shifts agree to rounding.
    std::vector<double> shifted = base;
    for (double& x : shifted) x += 0.1234567;
    const WeightVector wc = aew_weights({shifted, 20}, Temperature(0.5));
    for (std::size_t j = 0; j < base.size(); ++j)
        CHECK(wc.theta[j] == doctest::Approx(w0.theta[j]).epsilon(1e-12));
}

TEST_CASE("aew weights: simplex and monotonicity over random risks") {
    Rng rng = make_rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t m = 2 + uniform_index(rng, 9);
        std::vector<double> risks(m);
        for (double& r : risks) r = uniform01(rng);
        const double t = 0.05 + uniform01(rng) * 3.0;
        const std::size_t n = 1 + uniform_index(rng, 128);
        const WeightVector w = aew_weights({risks, n}, Temperature(t));
        CHECK(w.simplex_ok());
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                if (risks[j] < risks[k]) CHECK(w.theta[j] > w.theta[k]);
    }
}

TEST_CASE("aew weights: temperature limits") {
    // T -> 0 with a unique argmin concentrates on the ERM choice.
    const EmpiricalRisks risks{{0.4, 0.3, 0.7}, 10};
    const WeightVector cold = aew_weights(risks, Temperature(1e-6));
    CHECK(cold.theta[1] >= 1.0 - 1e-9);

    // T -> infinity flattens toward uniform: max deviation <= n (max - min) / T.
    const double t_hot = 1e7;
    const WeightVector hot = aew_weights(risks, Temperature(t_hot));
    const double bound = 10.0 * (0.7 - 0.3) / t_hot;
    for (double w : hot.theta) CHECK(std::abs(w - 1.0 / 3.0) <= bound);
}

TEST_CASE("erm selection") {
    CHECK(erm_select({{0.3, 0.1, 0.2}, 4}) == std::vector<std::size_t>{1});
    CHECK(erm_select({{0.1, 0.1}, 4}) == std::vector<std::size_t>{0, 1});
    CHECK(erm_select_single({{0.1, 0.1}, 4}) == 0);
}

TEST_CASE("aggregate risk: vertex case and dimension checks") {
    RiskModel model;
    model.m = 2;
    model.gram = {0.7, 0.1, 0.1, 0.9};
    model.cross = {0.2, -0.3};
    model.y2 = 1.5;
    const double r0 = aggregate_risk({{1.0, 0.0}}, model);
    CHECK(r0 == doctest::Approx(1.5 - 0.4 + 0.7).epsilon(1e-15));
    CHECK(r0 == doctest::Approx(model.vertex_risk(0)).epsilon(1e-15));
    CHECK_THROWS_AS(aggregate_risk({{1.0, 0.0, 0.0}}, model), std::invalid_argument);
}

TEST_CASE("aggregate risk: oracle second moment matches quadrature") {
    // E f1^2 = sqrt(12) * integral of u^2 * 2(u+lambda) over [-lambda, 1-lambda].
    const double lambda = 0.23;
    const TheoremBModel model =
        TheoremBModel::create(1000, 0.1, 1.0, 0.05, std::nullopt, lambda);
    const RiskModel rm = theorem_b_risk_model(model);

    const auto integrand = [&](double u) { return u * u * 2.0 * (u + lambda); };
    const int steps = 20000;  // Simpson
    const double a = -lambda, b = 1.0 - lambda, h = (b - a) / steps;
    double acc = integrand(a) + integrand(b);
    for (int i = 1; i < steps; ++i) acc += integrand(a + i * h) * (i % 2 ? 4.0 : 2.0);
    const double quadrature = std::sqrt(12.0) * acc * h / 3.0;

    CHECK(rm.vertex_risk(0) == doctest::Approx(quadrature).epsilon(1e-9));
    CHECK(rm.vertex_risk(0) ==
          doctest::Approx(std::sqrt(12.0) * (0.5 - 4.0 * lambda / 3.0 + lambda * lambda))
              .epsilon(1e-12));
}

TEST_CASE("aggregate risk: convexity over random simplex points") {
    const TheoremBModel model = TheoremBModel::create(500, 0.1, 1.0, 0.05);
    const RiskModel rm = theorem_b_risk_model(model);
    Rng rng = make_rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const WeightVector w = random_simplex(rm.m, rng);
        double mixture_of_risks = 0.0;
        for (std::size_t j = 0; j < rm.m; ++j)
            mixture_of_risks += w.theta[j] * rm.vertex_risk(j);
        const double risk_of_mixture = aggregate_risk(w, rm);
        CHECK(risk_of_mixture <= mixture_of_risks + 1e-12);
        CHECK(risk_of_mixture >= -1e-12);
    }
}

TEST_CASE("progressive mixture: single observation and constant prefixes") {
    const TheoremAModel model = TheoremAModel::create(11);
    const Dictionary dict = theorem_a_dictionary(model);
    const std::vector<Observation> one = {{1.0, 0.0}};
    const WeightVector direct = aew_weights(empirical_risk(dict, one), Temperature(0.7));
    const WeightVector prog = progressive_mixture(one, dict, Temperature(0.7));
    CHECK(prog.theta[0] == doctest::Approx(direct.theta[0]).epsilon(1e-15));

    const std::vector<Observation> same(9, Observation{-1.0, 0.0});
    const WeightVector prog_same = progressive_mixture(same, dict, Temperature(0.7));
    const WeightVector prefix =
        aew_weights(empirical_risk(dict, {same.data(), 3}), Temperature(0.7));
    CHECK(prog_same.theta[0] == doctest::Approx(prefix.theta[0]).epsilon(1e-12));
    CHECK(prog_same.simplex_ok());
}

TEST_CASE("progressive mixture: risk dominated by the average stagewise risk") {
    const TheoremAModel model = TheoremAModel::create(15);
    const Dictionary dict = theorem_a_dictionary(model);
    const RiskModel& rm = *dict.risk_model;
    Rng rng = make_rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<Observation> sample = theorem_a_sample(model, rng);
        // average stagewise risk, brute force over prefixes
        double average = 0.0;
        for (std::size_t k = 1; k <= sample.size(); ++k) {
            const WeightVector wk =
                aew_weights(empirical_risk(dict, {sample.data(), k}), Temperature(0.5));
            average += aggregate_risk(wk, rm);
        }
        average /= static_cast<double>(sample.size());
        const WeightVector prog = progressive_mixture(sample, dict, Temperature(0.5));
        CHECK(aggregate_risk(prog, rm) <= average + 1e-12);
    }
}
