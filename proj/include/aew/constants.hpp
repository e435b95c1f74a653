#pragma once

#include <map>
#include <string>

namespace aew {

// The bounds in this problem family hold up to unnamed absolute constants.
// Every such constant defaults to 1 and can be overridden per run
// (CLI: --constants key=value,...).
struct Constants {
    double lambda_c = 1.0;      // c in lambda(x) = c max{r_bar, (b+B)x/n}
    double kappa1 = 1.0;        // rho = kappa1 (b+B)/n in the k0 partition
    double c1_u = 1.0;          // multiplier of both u(r) summands
    double c2_pac = 1.0;        // high-temperature residual multiplier
    double c2_key = 1.0;        // key-estimate multiplier
    double c0_temp = 1.0;       // low-temperature threshold c0 * max{b,B}
    double c_m = 1.0;           // dictionary size M = ceil(c_m sqrt(n log n))
    double c5_excess = 1.0;     // weight-collapse excess flag threshold factor
    double berry_a = 0.56;      // Berry-Esseen constant A
    double petrov_b0 = 1.0;     // moderate-deviation grid cutoff B0 n^{1/6}
    double rbar_bracket = 1.0;  // initial r_bar bracket = 8 * this * (b+B)log(M+1)/n

    void apply(const std::string& key, double value);
    static Constants from_overrides(const std::map<std::string, double>& kv);
};

}  // namespace aew
