#include "biokernel/json_io.hpp"

namespace biokernel::json_io {

using wcatalog::WFunction;

namespace {

complexd complex_from_json(const json& j, const char* key, complexd fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number()) return complexd(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2)
        return complexd(v.at(0).get<double>(), v.at(1).get<double>());
    throw ConfigError(std::string("field '") + key + "' must be a number or [re, im]");
}

json complex_to_json(complexd z) {
    if (z.imag() == 0.0) return json(z.real());
    return json::array({z.real(), z.imag()});
}

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
    return j.at(key).get<double>();
}

} // namespace

json to_json(const WFunction& w) {
    using Kind = WFunction::Kind;
    json j;
    json params = json::object();
    switch (w.kind()) {
        case Kind::Gaussian:
            j["variant"] = "gaussian";
            params["tau"] = w.tau();
            params["gamma"] = w.gamma_lin();
            break;
        case Kind::RationalLUE:
            j["variant"] = "rational_lue";
            params["N"] = w.lue_n();
            params["nu"] = w.nu();
            break;
        case Kind::GammaLUEstar:
            j["variant"] = "gamma_lue_star";
            params["nu"] = w.nu();
            break;
        case Kind::BetaJUE:
            j["variant"] = "beta_jue";
            params["mu"] = w.mu();
            params["nu"] = w.nu();
            break;
        case Kind::BetaCLUE:
            j["variant"] = "beta_clue";
            params["beta"] = w.mu();
            params["gamma"] = w.gamma_lin();
            break;
        case Kind::PolyaProduct:
            j["variant"] = "polya_product";
            params["tau"] = w.tau();
            params["gamma"] = w.gamma_lin();
            params["b"] = w.polya_b();
            break;
        case Kind::Product:
            j["variant"] = "product";
            params["left"] = to_json(w.left());
            params["right"] = to_json(w.right());
            break;
    }
    j["params"] = params;
    if (w.kind() != Kind::Product) j["normalization"] = complex_to_json(w.normalization());
    return j;
}

WFunction w_from_json(const json& j) {
    if (!j.contains("variant"))
        throw ConfigError("W function object needs a 'variant' field");
    const std::string variant = j.at("variant").get<std::string>();
    const json params = j.value("params", json::object());
    const complexd norm = complex_from_json(j, "normalization", complexd(1.0));
    if (variant == "gaussian")
        return WFunction::gaussian(need_number(params, "tau"), need_number(params, "gamma"),
                                   norm);
    if (variant == "rational_lue")
        return WFunction::rational_lue(int(need_number(params, "N")),
                                       need_number(params, "nu"), norm);
    if (variant == "gamma_lue_star")
        return WFunction::gamma_lue_star(need_number(params, "nu"), norm);
    if (variant == "beta_jue")
        return WFunction::beta_jue(need_number(params, "mu"), need_number(params, "nu"),
                                   norm);
    if (variant == "beta_clue")
        return WFunction::beta_clue(need_number(params, "beta"),
                                    need_number(params, "gamma"), norm);
    if (variant == "polya_product") {
        if (!params.contains("b") || !params.at("b").is_array())
            throw ConfigError("polya_product needs an array field 'b'");
        std::vector<double> b = params.at("b").get<std::vector<double>>();
        return WFunction::polya_product(need_number(params, "tau"),
                                        need_number(params, "gamma"), std::move(b), norm);
    }
    if (variant == "product") {
        if (!params.contains("left") || !params.contains("right"))
            throw ConfigError("product needs 'left' and 'right' W objects");
        return WFunction::product(w_from_json(params.at("left")),
                                  w_from_json(params.at("right")));
    }
    throw ConfigError("unknown W variant '" + variant + "'");
}

json to_json(const kernels::EnsembleSpec& spec) {
    json j;
    j["W"] = to_json(spec.W());
    json arr = json::array();
    for (const auto& s : spec.sources())
        arr.push_back({{"b", complex_to_json(s.b)}, {"mult", s.mult}});
    j["sources"] = arr;
    return j;
}

kernels::EnsembleSpec spec_from_json(const json& j) {
    if (!j.contains("W")) throw ConfigError("ensemble needs a 'W' object");
    if (!j.contains("sources") || !j.at("sources").is_array())
        throw ConfigError("ensemble needs a 'sources' array");
    WFunction w = w_from_json(j.at("W"));
    std::vector<kernels::Source> sources;
    for (const auto& s : j.at("sources")) {
        kernels::Source src;
        src.b = complex_from_json(s, "b", complexd(0.0));
        if (!s.contains("b")) throw ConfigError("source entry needs field 'b'");
        src.mult = s.value("mult", 1);
        sources.push_back(src);
    }
    return kernels::EnsembleSpec(std::move(w), std::move(sources));
}

QuadratureSettings settings_from_json(const json& j) {
    QuadratureSettings s;
    if (j.is_null()) return s;
    s.rel_tol = j.value("rel_tol", s.rel_tol);
    s.abs_tol = j.value("abs_tol", s.abs_tol);
    s.max_nodes = j.value("max_nodes", s.max_nodes);
    s.validate();
    return s;
}

kernels::ContourPlan plan_from_json(const json& j, const kernels::EnsembleSpec& spec) {
    if (j.is_null()) return kernels::default_contour_plan(spec);
    kernels::ContourPlan plan = kernels::default_contour_plan(spec);
    if (j.contains("circle")) {
        const json& c = j.at("circle");
        plan.sigma.center = complex_from_json(c, "center", plan.sigma.center);
        plan.sigma.radius = c.value("radius", plan.sigma.radius);
        plan.sigma.nodes = c.value("nodes", plan.sigma.nodes);
    }
    if (j.contains("c")) plan.line_abscissa = j.at("c").get<double>();
    if (j.contains("sine_correction_alpha"))
        plan.sine_correction_alpha = j.at("sine_correction_alpha").get<double>();
    return plan;
}

} // namespace biokernel::json_io
