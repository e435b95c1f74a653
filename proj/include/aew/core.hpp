#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace aew {

struct Observation {
    double x = 0.0;
    double y = 0.0;
};

// Exact second-moment description of a dictionary under quadratic loss:
// R(theta) = y2 - 2 theta'cross + theta'gram theta.
struct RiskModel {
    std::size_t m = 0;
    std::vector<double> gram;   // row-major m x m, gram[j*m+k] = E f_j f_k
    std::vector<double> cross;  // cross[j] = E Y f_j
    double y2 = 0.0;            // E Y^2

    double& at(std::size_t j, std::size_t k) { return gram[j * m + k]; }
    double at(std::size_t j, std::size_t k) const { return gram[j * m + k]; }
    // Risk of the single dictionary element f_j.
    double vertex_risk(std::size_t j) const;
};

struct Dictionary {
    std::vector<std::function<double(double)>> functions;
    std::optional<RiskModel> risk_model;
    double bound = 1.0;  // uniform bound on loss values

    std::size_t size() const { return functions.size(); }
};

struct EmpiricalRisks {
    std::vector<double> values;  // values[j] = R_n(f_j)
    std::size_t n = 0;           // sample size
};

struct WeightVector {
    std::vector<double> theta;

    std::size_t size() const { return theta.size(); }
    // theta[j] in [0,1] and sum == 1 within tol.
    bool simplex_ok(double tol = 1e-12) const;
};

struct Temperature {
    double value;
    explicit Temperature(double t);
};

// The loss is a closed enumeration with a single variant; the constructions
// in this project are all squared-error.
enum class Loss { quadratic };

// R_n(f_j) = (1/n) sum_i (y_i - f_j(x_i))^2.
EmpiricalRisks empirical_risk(const Dictionary& dict,
                              std::span<const Observation> sample,
                              Loss loss = Loss::quadratic);

// Gibbs weights theta_j proportional to exp(-(n/T) R_n(f_j)), computed after
// subtracting the minimum risk so n/T up to ~1e7 cannot overflow.
WeightVector aew_weights(const EmpiricalRisks& risks, Temperature t);

// All argmin indices of R_n (0-based), ascending.
std::vector<std::size_t> erm_select(const EmpiricalRisks& risks);
// Smallest argmin index: the deterministic single-selection rule.
std::size_t erm_select_single(const EmpiricalRisks& risks);

// Exact quadratic risk of the convex combination described by `weights`.
double aggregate_risk(const WeightVector& weights, const RiskModel& model);

// Cesaro average over k = 1..n of the exponential-weights vector computed
// from the first k observations.
WeightVector progressive_mixture(std::span<const Observation> sample,
                                 const Dictionary& dict, Temperature t);

}  // namespace aew
