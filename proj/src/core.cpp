#include "aew/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aew {

double RiskModel::vertex_risk(std::size_t j) const {
    if (j >= m) throw std::invalid_argument("vertex_risk: index out of range");
    return y2 - 2.0 * cross[j] + at(j, j);
}

bool WeightVector::simplex_ok(double tol) const {
    double sum = 0.0;
    for (double w : theta) {
        if (!(w >= 0.0 && w <= 1.0)) return false;
        sum += w;
    }
    return std::abs(sum - 1.0) <= tol;
}

Temperature::Temperature(double t) : value(t) {
    if (!std::isfinite(t) || t <= 0.0)
        throw std::invalid_argument("temperature must be finite and > 0");
}

EmpiricalRisks empirical_risk(const Dictionary& dict,
                              std::span<const Observation> sample, Loss loss) {
    (void)loss;  // single variant
    if (sample.empty()) throw std::invalid_argument("empirical_risk: empty sample");
    const std::size_t m = dict.size();
    std::vector<double> sums(m, 0.0);
    for (const Observation& obs : sample) {
        for (std::size_t j = 0; j < m; ++j) {
            const double r = obs.y - dict.functions[j](obs.x);
            sums[j] += r * r;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(sample.size());
    for (double& s : sums) s *= inv_n;
    return {std::move(sums), sample.size()};
}

WeightVector aew_weights(const EmpiricalRisks& risks, Temperature t) {
    if (risks.values.empty()) throw std::invalid_argument("aew_weights: empty risks");
    for (double r : risks.values)
        if (!std::isfinite(r)) throw std::invalid_argument("aew_weights: non-finite risk");
    const double rmin = *std::min_element(risks.values.begin(), risks.values.end());
    const double scale = static_cast<double>(risks.n) / t.value;
    std::vector<double> w(risks.values.size());
    double z = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = std::exp(-scale * (risks.values[j] - rmin));
        z += w[j];
    }
    for (double& wj : w) wj /= z;
    return {std::move(w)};
}

std::vector<std::size_t> erm_select(const EmpiricalRisks& risks) {
    if (risks.values.empty()) throw std::invalid_argument("erm_select: empty risks");
    for (double r : risks.values)
        if (!std::isfinite(r)) throw std::invalid_argument("erm_select: non-finite risk");
    const double rmin = *std::min_element(risks.values.begin(), risks.values.end());
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < risks.values.size(); ++j)
        if (risks.values[j] == rmin) idx.push_back(j);
    return idx;
}

std::size_t erm_select_single(const EmpiricalRisks& risks) {
    return erm_select(risks).front();
}

double aggregate_risk(const WeightVector& weights, const RiskModel& model) {
    const std::size_t m = model.m;
    if (weights.size() != m || model.gram.size() != m * m || model.cross.size() != m)
        throw std::invalid_argument("aggregate_risk: dimension mismatch");
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        lin += weights.theta[j] * model.cross[j];
        const double* row = model.gram.data() + j * m;
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) acc += row[k] * weights.theta[k];
        quad += weights.theta[j] * acc;
    }
    return model.y2 - 2.0 * lin + quad;
}

WeightVector progressive_mixture(std::span<const Observation> sample,
                                 const Dictionary& dict, Temperature t) {
    if (sample.empty())
        throw std::invalid_argument("progressive_mixture: empty sample");
    const std::size_t m = dict.size();
    std::vector<double> loss_sums(m, 0.0);
    std::vector<double> acc(m, 0.0);
    EmpiricalRisks prefix;
    prefix.values.resize(m);
    for (std::size_t k = 0; k < sample.size(); ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            const double r = sample[k].y - dict.functions[j](sample[k].x);
            loss_sums[j] += r * r;
            prefix.values[j] = loss_sums[j] / static_cast<double>(k + 1);
        }
        prefix.n = k + 1;
        const WeightVector wk = aew_weights(prefix, t);
        for (std::size_t j = 0; j < m; ++j) acc[j] += wk.theta[j];
    }
    const double inv_n = 1.0 / static_cast<double>(sample.size());
    for (double& a : acc) a *= inv_n;
    return {std::move(acc)};
}

}  // namespace aew
