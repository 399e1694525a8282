#include "hjdebt/model_params.hpp"

#include <algorithm>
#include <cmath>

#include "hjdebt/errors.hpp"

namespace hjdebt {

double SalvageFunction::operator()(double s) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Inverse: return s > 0.0 ? std::min(1.0, R / s) : 1.0;
        case Kind::Power:
            return s > 0.0 ? std::clamp(scale * std::pow(s, -exponent), 0.0, 1.0) : 1.0;
    }
    return value;
}

std::string SalvageFunction::name() const {
    switch (kind) {
        case Kind::Constant: return "constant";
        case Kind::Inverse: return "inverse";
        case Kind::Power: return "power";
    }
    return "constant";
}

void ModelParams::check() const {
    if (!(discount > growth) || !(growth >= 0.0)) {
        throw Error(ErrorKind::Domain, "model: need r > mu >= 0");
    }
    if (!(repayment >= 0.0)) throw Error(ErrorKind::Domain, "model: need lambda >= 0");
    if (!(x_bankrupt > 0.0)) throw Error(ErrorKind::Domain, "model: need x_star > 0");
    if (!(bankruptcy_cost > 0.0)) throw Error(ErrorKind::Domain, "model: need B > 0");
    const double th = salvage(x_bankrupt);
    if (!(th >= 0.0 && th <= 1.0)) {
        throw Error(ErrorKind::Domain, "model: theta(x_star) must lie in [0,1]");
    }
}

}  // namespace hjdebt
