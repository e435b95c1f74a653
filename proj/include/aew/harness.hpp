#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aew/constants.hpp"
#include "aew/constructions.hpp"
#include "aew/core.hpp"
#include "aew/report.hpp"
#include "aew/rng.hpp"
#include "aew/stats.hpp"

namespace aew {

enum class TheoremId { a, b, c };
enum class DictionaryKind { bernstein, theorem_a };

struct ExperimentConfig {
    TheoremId theorem = TheoremId::a;
    std::vector<int> n_grid;
    std::vector<double> t_grid;
    long long trials = 1000;
    std::uint64_t master_seed = 0;
    bool seed_set = false;

    // theorem B construction parameters
    double epsilon = 0.1;
    double kappa = 1.0;
    std::optional<double> lambda_override;
    std::optional<int> m_override;

    // theorem C dictionary parameters
    int dict_m = 50;
    double dict_b = 1.0;
    DictionaryKind dict_kind = DictionaryKind::bernstein;
    double x = 3.0;  // confidence parameter

    std::optional<double> threshold;  // theorem A tail threshold; default (2 sqrt n)^-1
    int workers = 0;                  // 0: hardware concurrency
    Constants constants;

    // Checks every construction precondition before any computation runs.
    void validate() const;
};

// One Monte Carlo replicate. The grid runners retain only the scalar fields;
// the vectors are kept when trials are run one-off (tests, diagnostics).
struct TrialRecord {
    long long index = -1;
    std::uint64_t seed = 0;
    std::vector<double> risks;  // empirical risks (theorem B: the Rbar vector)
    WeightVector weights;
    double excess = 0.0;  // exact risk of the aggregate minus the oracle risk
    std::optional<std::size_t> collapse_index;  // argmax weight when >= 1 - rho
    bool system_satisfied = false;
    bool excess_flag = false;   // excess >= c5 eps sqrt(log M / n)
    bool iso_violation = false; // some Delta R >= lambda(x) halved empirically
};

TrialRecord run_theorem_a_trial(const TheoremAModel& model, double temperature,
                                std::uint64_t seed);
// Streams the n x M draws; throws if the satisfied system fails to force
// the predicted weight.
TrialRecord run_theorem_b_trial(const TheoremBModel& model, const RiskModel& risk_model,
                                const Constants& constants, std::uint64_t seed);
TrialRecord run_theorem_c_trial(const BernsteinModel& model, int n, double temperature,
                                double iso_lambda, std::uint64_t seed);

struct TrialSummary {
    MeanStderr excess;
    double tail_threshold = 0.0;
    std::size_t tail_count = 0;
    double tail_freq = 0.0;
    WilsonInterval tail_wilson;
    double quantile_level = 0.0;
    double excess_quantile = 0.0;
};

TrialSummary summarize(std::span<const TrialRecord> records, double tail_threshold,
                       double quantile_level);

// Grid runners. The returned table is a pure function of the config
// (including the seed) and does not depend on the worker count.
ResultTable run_theorem_a(const ExperimentConfig& config,
                          std::vector<std::string>* warnings = nullptr);
ResultTable run_theorem_b(const ExperimentConfig& config,
                          std::vector<std::string>* warnings = nullptr);
ResultTable run_theorem_c(const ExperimentConfig& config,
                          std::vector<std::string>* warnings = nullptr);

ResultTable run_experiment(const ExperimentConfig& config,
                           std::vector<std::string>* warnings = nullptr);

// OLS slope of log(y_col) against log(x_col); rows with y <= 0 are skipped.
double rate_fit_slope(const ResultTable& table, const std::string& x_col,
                      const std::string& y_col);

}  // namespace aew
