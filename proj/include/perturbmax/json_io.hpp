#pragma once

// JSON wire formats. Kept out of the numeric headers so library users who
// never serialize do not pay for the json dependency.

#include <json.hpp>

#include "perturbmax/core.hpp"
#include "perturbmax/estimators.hpp"
#include "perturbmax/exact.hpp"
#include "perturbmax/fitting.hpp"
#include "perturbmax/probes.hpp"

namespace pmax {

// {"family": "gumbel"|"normal"|"uniform"|"discrete", "scale": number}
inline void to_json(nlohmann::json& j, const PerturbationSpec& s) {
    j = nlohmann::json{{"family", to_string(s.family)}, {"scale", s.scale}};
}

inline void from_json(const nlohmann::json& j, PerturbationSpec& s) {
    const Family family = family_from_string(j.at("family").get<std::string>());
    const double scale = j.contains("scale") ? j.at("scale").get<double>() : 1.0;
    s = PerturbationSpec(family, scale);
}

// {"mean": [...], "std_error": [...], "n_samples": N, "seed": S}
inline void to_json(nlohmann::json& j, const Estimate& e) {
    j = nlohmann::json{{"mean", e.mean},
                       {"std_error", e.std_error},
                       {"n_samples", e.n_samples},
                       {"seed", e.seed}};
}

inline void to_json(nlohmann::json& j, const JacobianEstimate& e) {
    j = nlohmann::json{{"dim", e.dim},
                       {"mean", e.mean},
                       {"std_error", e.std_error},
                       {"n_samples", e.n_samples},
                       {"seed", e.seed}};
}

}  // namespace pmax

namespace pmax::exact {

// {"region": "...", "value": number | [...]}
inline void to_json(nlohmann::json& j, const PiecewiseReport& r) {
    j["region"] = r.region;
    if (r.value.size() == 1)
        j["value"] = r.value[0];
    else
        j["value"] = r.value;
}

inline void to_json(nlohmann::json& j, const Interval& iv) {
    j = nlohmann::json{{"lo", iv.lo}, {"hi", iv.hi}};
}

}  // namespace pmax::exact

namespace pmax::probes {

inline void to_json(nlohmann::json& j, const ProbeResult& r) {
    j = nlohmann::json{{"name", r.name},         {"passed", r.passed},
                       {"observed", r.observed}, {"threshold", r.threshold},
                       {"detail", r.detail},     {"seed", r.seed}};
}

}  // namespace pmax::probes

namespace pmax::fitting {

inline void to_json(nlohmann::json& j, const TargetDistribution& t) {
    if (const auto* b = std::get_if<Binomial>(&t)) {
        j = nlohmann::json{{"kind", "binomial"}, {"trials", b->trials}, {"p", b->p}};
    } else if (const auto* po = std::get_if<Poisson>(&t)) {
        j = nlohmann::json{{"kind", "poisson"}, {"lambda", po->lambda}, {"dim", po->dim}};
    } else if (const auto* nb = std::get_if<NegBinomial>(&t)) {
        j = nlohmann::json{{"kind", "negative_binomial"}, {"r", nb->r}, {"p", nb->p}, {"dim", nb->dim}};
    } else {
        j = nlohmann::json{{"kind", "explicit"}, {"weights", std::get<Explicit>(t).weights}};
    }
}

inline void from_json(const nlohmann::json& j, TargetDistribution& t) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "binomial")
        t = Binomial{j.at("trials").get<int>(), j.at("p").get<double>()};
    else if (kind == "poisson")
        t = Poisson{j.at("lambda").get<double>(), j.at("dim").get<int>()};
    else if (kind == "negative_binomial")
        t = NegBinomial{j.at("r").get<double>(), j.at("p").get<double>(), j.at("dim").get<int>()};
    else if (kind == "explicit")
        t = Explicit{j.at("weights").get<std::vector<double>>()};
    else
        throw std::invalid_argument("unknown target kind: " + kind);
}

inline void to_json(nlohmann::json& j, const FitConfig& c) {
    j = nlohmann::json{{"target", c.target},
                       {"spec", c.spec},
                       {"temperature", c.temperature},
                       {"lr", c.lr},
                       {"iters", c.iters},
                       {"batch", c.batch},
                       {"init", c.init.kind == InitKind::UniformConstant ? "uniform_constant" : "seeded"},
                       {"init_noise_scale", c.init.noise_scale},
                       {"seed", c.seed},
                       {"adam_beta1", c.adam_beta1},
                       {"adam_beta2", c.adam_beta2},
                       {"adam_eps", c.adam_eps},
                       {"objective", to_string(c.objective)},
                       {"target_samples", c.target_samples},
                       {"space", to_string(c.space)},
                       {"eval_samples", c.eval_samples}};
}

}  // namespace pmax::fitting
