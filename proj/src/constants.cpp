#include "aew/constants.hpp"

#include <stdexcept>

namespace aew {

void Constants::apply(const std::string& key, double value) {
    if (key == "lambda_c") lambda_c = value;
    else if (key == "kappa1") kappa1 = value;
    else if (key == "c1_u") c1_u = value;
    else if (key == "c2_pac") c2_pac = value;
    else if (key == "c2_key") c2_key = value;
    else if (key == "c0_temp") c0_temp = value;
    else if (key == "c_m") c_m = value;
    else if (key == "c5_excess") c5_excess = value;
    else if (key == "berry_a") berry_a = value;
    else if (key == "petrov_b0") petrov_b0 = value;
    else if (key == "rbar_bracket") rbar_bracket = value;
    else throw std::invalid_argument("unknown constant override: " + key);
}

Constants Constants::from_overrides(const std::map<std::string, double>& kv) {
    Constants c;
    for (const auto& [k, v] : kv) c.apply(k, v);
    return c;
}

}  // namespace aew
