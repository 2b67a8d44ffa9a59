#include "curveforge/model.hpp"

#include <algorithm>

#include "curveforge/error.hpp"

namespace curveforge {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::Vasicek: return "vasicek";
        case ModelKind::G2pp: return "g2pp";
        case ModelKind::HoLee: return "holee";
        case ModelKind::HullWhite: return "hullwhite";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (auto k : {ModelKind::Vasicek, ModelKind::G2pp, ModelKind::HoLee, ModelKind::HullWhite})
        if (to_string(k) == name) return k;
    throw Error(ErrorKind::Domain, "unknown model '" + std::string(name) + "'");
}

ModelKind kind_of(const ModelParams& params) noexcept {
    return static_cast<ModelKind>(params.index());
}

int factor_count(ModelKind kind) noexcept { return kind == ModelKind::G2pp ? 2 : 1; }

bool needs_curve(ModelKind kind) noexcept { return kind != ModelKind::Vasicek; }

std::vector<std::pair<std::string, double>> named_values(const ModelParams& params) {
    switch (kind_of(params)) {
        case ModelKind::Vasicek: {
            const auto& p = std::get<VasicekParams>(params);
            return {{"a", p.a}, {"b", p.b}, {"sigma", p.sigma}};
        }
        case ModelKind::G2pp: {
            const auto& p = std::get<G2Params>(params);
            return {{"a", p.a}, {"b", p.b}, {"sigma", p.sigma}, {"eta", p.eta}, {"rho", p.rho}};
        }
        case ModelKind::HoLee: return {{"sigma", std::get<HoLeeParams>(params).sigma}};
        case ModelKind::HullWhite: {
            const auto& p = std::get<HullWhiteParams>(params);
            return {{"a", p.a}, {"sigma", p.sigma}};
        }
    }
    return {};
}

ModelParams params_from_named(ModelKind kind,
                              const std::vector<std::pair<std::string, double>>& values) {
    const auto get = [&](const std::string& name) {
        const auto it = std::find_if(values.begin(), values.end(),
                                     [&](const auto& kv) { return kv.first == name; });
        CURVEFORGE_REQUIRE(it != values.end(), ErrorKind::Domain,
                           std::string(to_string(kind)) + " parameter '" + name + "' missing");
        return it->second;
    };
    switch (kind) {
        case ModelKind::Vasicek: return VasicekParams{get("a"), get("b"), get("sigma")};
        case ModelKind::G2pp: return G2Params{get("a"), get("b"), get("sigma"), get("eta"), get("rho")};
        case ModelKind::HoLee: return HoLeeParams{get("sigma")};
        case ModelKind::HullWhite: return HullWhiteParams{get("a"), get("sigma")};
    }
    throw Error(ErrorKind::Domain, "unknown model");
}

double model_price(const ModelParams& params, const DiscountCurve* curve, const StatePoint& state,
                   Time T, HullWhiteDamping damping) {
    const ModelKind kind = kind_of(params);
    CURVEFORGE_REQUIRE(!needs_curve(kind) || curve != nullptr, ErrorKind::Precondition,
                       std::string(to_string(kind)) + " pricing needs an initial curve");
    switch (kind) {
        case ModelKind::Vasicek:
            return vasicek_price(std::get<VasicekParams>(params), state.x, state.t, T);
        case ModelKind::G2pp:
            return g2pp_price(std::get<G2Params>(params), *curve, {state.x, state.y, state.t}, T);
        case ModelKind::HoLee:
            return holee_price(std::get<HoLeeParams>(params), *curve, state.x, state.t, T);
        case ModelKind::HullWhite:
            return hullwhite_price(std::get<HullWhiteParams>(params), *curve, state.x, state.t, T,
                                   damping);
    }
    throw Error(ErrorKind::Domain, "unknown model");
}

}  // namespace curveforge
