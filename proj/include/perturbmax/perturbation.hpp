#pragma once

// The four perturbation families the models are analyzed under: zero-mean
// Gumbel, standard Normal, symmetric Uniform, and the symmetric two-point
// discrete distribution. Every family has mean zero.
//
// The Gumbel family uses cdf G(t) = exp(-exp(-(t + c))) with c the
// Euler-Mascheroni constant, and the matching density
// g(t) = exp(-(t + c)) * G(t), so that g = dG/dt exactly and the mean is 0.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perturbmax/core.hpp"
#include "perturbmax/rng.hpp"

namespace pmax {

enum class Family { GumbelZeroMean, StandardNormal, UniformSym, TwoPointDiscrete };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::GumbelZeroMean: return "gumbel";
        case Family::StandardNormal: return "normal";
        case Family::UniformSym: return "uniform";
        case Family::TwoPointDiscrete: return "discrete";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "gumbel") return Family::GumbelZeroMean;
    if (s == "normal") return Family::StandardNormal;
    if (s == "uniform") return Family::UniformSym;
    if (s == "discrete") return Family::TwoPointDiscrete;
    throw std::invalid_argument("unknown perturbation family: " + s);
}

/// scale is the Uniform half-width or the discrete magnitude; Gumbel and
/// Normal are parameter-free and ignore it. UniformSym admits scale 0 as the
/// degenerate zero-perturbation (sampling only; it has no density).
struct PerturbationSpec {
    Family family = Family::GumbelZeroMean;
    double scale = 1.0;

    PerturbationSpec() = default;
    PerturbationSpec(Family f, double s = 1.0) : family(f), scale(s) {
        if (!std::isfinite(scale)) throw std::invalid_argument("PerturbationSpec: non-finite scale");
        if (family == Family::UniformSym ? scale < 0.0 : scale <= 0.0)
            throw std::invalid_argument("PerturbationSpec: scale must be positive");
    }

    bool continuous() const { return family != Family::TwoPointDiscrete; }
};

namespace detail {

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }
inline double normal_pdf(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * 3.14159265358979323846);
}

// Uniforms consumed per coordinate: Box-Muller needs two, the rest one.
inline unsigned draws_per_coordinate(const PerturbationSpec& s) {
    return s.family == Family::StandardNormal ? 2u : 1u;
}

// Maps uniform draws in (0,1) to one sample of the family. u2 is only
// consumed by the Normal family.
inline double from_units(const PerturbationSpec& s, double u1, double u2) {
    switch (s.family) {
        case Family::GumbelZeroMean:
            return -std::log(-std::log(u1)) - kEulerGamma;
        case Family::StandardNormal:
            return std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * 3.14159265358979323846 * u2);
        case Family::UniformSym:
            return s.scale * (2.0 * u1 - 1.0);
        case Family::TwoPointDiscrete:
            return u1 > 0.5 ? s.scale : -s.scale;
    }
    return 0.0;
}

}  // namespace detail

/// d i.i.d. draws from the family, consuming the stream sequentially.
inline std::vector<double> sample_perturbation(const PerturbationSpec& spec, std::size_t d,
                                               RngStream& rng) {
    if (d < 1) throw std::invalid_argument("sample_perturbation: d must be >= 1");
    std::vector<double> out(d);
    const bool two = detail::draws_per_coordinate(spec) == 2;
    for (std::size_t i = 0; i < d; ++i) {
        const double u1 = rng.next_unit();
        const double u2 = two ? rng.next_unit() : 0.0;
        out[i] = detail::from_units(spec, u1, u2);
    }
    return out;
}

/// Exact cdf. The discrete family returns the right-continuous step function.
inline double family_cdf(const PerturbationSpec& spec, double t) {
    switch (spec.family) {
        case Family::GumbelZeroMean:
            return std::exp(-std::exp(-(t + kEulerGamma)));
        case Family::StandardNormal:
            return detail::normal_cdf(t);
        case Family::UniformSym: {
            if (spec.scale == 0.0) return t < 0.0 ? 0.0 : 1.0;
            if (t <= -spec.scale) return 0.0;
            if (t >= spec.scale) return 1.0;
            return (t + spec.scale) / (2.0 * spec.scale);
        }
        case Family::TwoPointDiscrete:
            if (t < -spec.scale) return 0.0;
            if (t < spec.scale) return 0.5;
            return 1.0;
    }
    return 0.0;
}

/// Density of a continuous family. The discrete family has no density;
/// callers that need mass use family_pmf.
inline double family_pdf(const PerturbationSpec& spec, double t) {
    switch (spec.family) {
        case Family::GumbelZeroMean: {
            const double z = t + kEulerGamma;
            return std::exp(-z) * std::exp(-std::exp(-z));
        }
        case Family::StandardNormal:
            return detail::normal_pdf(t);
        case Family::UniformSym:
            if (spec.scale == 0.0)
                throw std::domain_error("family_pdf: degenerate uniform (scale 0) has no density");
            return (t >= -spec.scale && t <= spec.scale) ? 1.0 / (2.0 * spec.scale) : 0.0;
        case Family::TwoPointDiscrete:
            throw std::domain_error("family_pdf: discrete family has no density");
    }
    return 0.0;
}

/// Point mass of the discrete family: 1/2 on +-scale, 0 elsewhere.
inline double family_pmf(const PerturbationSpec& spec, double t) {
    if (spec.family != Family::TwoPointDiscrete)
        throw std::domain_error("family_pmf: only the discrete family carries point mass");
    return (t == spec.scale || t == -spec.scale) ? 0.5 : 0.0;
}

/// Quantile function, used to pick quadrature truncation bounds.
inline double family_quantile(const PerturbationSpec& spec, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("family_quantile: q must be in (0,1)");
    switch (spec.family) {
        case Family::GumbelZeroMean:
            return -std::log(-std::log(q)) - kEulerGamma;
        case Family::StandardNormal: {
            // Bisection on the cdf; plenty for tail-bound selection and
            // exact to ~1e-13 after 100 halvings of [-42, 42].
            double lo = -42.0, hi = 42.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (detail::normal_cdf(mid) < q ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        case Family::UniformSym:
            if (spec.scale == 0.0)
                throw std::domain_error("family_quantile: degenerate uniform (scale 0)");
            return spec.scale * (2.0 * q - 1.0);
        case Family::TwoPointDiscrete:
            return q <= 0.5 ? -spec.scale : spec.scale;
    }
    return 0.0;
}

}  // namespace pmax
