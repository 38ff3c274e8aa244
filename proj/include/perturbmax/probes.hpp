#pragma once

// Numerical probes of the representation properties: completeness limits,
// translation (non-)identifiability, strict convexity, the gradient
// identities, and the two identifiability counterexamples. Probes are
// evidence with explicit thresholds, not proofs; every result records the
// seed that produced it and reproduces bit-for-bit.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "perturbmax/core.hpp"
#include "perturbmax/estimators.hpp"
#include "perturbmax/exact.hpp"

namespace pmax::probes {

struct ProbeResult {
    std::string name;
    bool passed = false;
    std::vector<double> observed;
    std::vector<double> threshold;
    std::string detail;  // records the relation observed vs threshold
    std::uint64_t seed = 0;
};

enum class MapKind { Softmax, Argmax };
enum class PotentialKind { LogSumExp, Max };

inline const char* to_string(MapKind m) { return m == MapKind::Softmax ? "softmax" : "argmax"; }
inline const char* to_string(PotentialKind p) {
    return p == PotentialKind::LogSumExp ? "logsumexp" : "max";
}

/// The completeness construction: theta^(n) puts n at the target index and 0
/// elsewhere; the target coordinate of the map must climb toward 1.
/// Returns (n, estimate of coordinate i) per level; all levels share the
/// stream, so the series is common-random-numbers smooth.
inline std::vector<std::pair<double, Estimate>> completeness_probe(
    const PerturbationSpec& spec, MapKind map, std::size_t target_index,
    const std::vector<double>& levels, std::size_t d, const McConfig& mc) {
    if (target_index >= d) throw std::invalid_argument("completeness_probe: target_index >= d");
    if (d < 2) throw std::invalid_argument("completeness_probe: d must be >= 2");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] < 0.0 || (k > 0 && levels[k] <= levels[k - 1]))
            throw std::invalid_argument(
                "completeness_probe: levels must be strictly increasing and non-negative");
    }
    std::vector<std::pair<double, Estimate>> series;
    series.reserve(levels.size());
    for (double n : levels) {
        std::vector<double> values(d, 0.0);
        values[target_index] = n;
        const Logits theta(std::move(values));
        Estimate full = map == MapKind::Softmax ? perturb_softmax_mc(theta, spec, 1.0, mc)
                                                : perturb_argmax_mc(theta, spec, mc);
        Estimate coord;
        coord.mean = {full.mean[target_index]};
        coord.std_error = {full.std_error[target_index]};
        coord.n_samples = full.n_samples;
        coord.seed = full.seed;
        series.push_back({n, std::move(coord)});
    }
    return series;
}

/// Wraps the series in a pass/fail: non-decreasing up to 2 * std_error noise.
inline ProbeResult completeness_check(const PerturbationSpec& spec, MapKind map,
                                      std::size_t target_index, const std::vector<double>& levels,
                                      std::size_t d, const McConfig& mc) {
    const auto series = completeness_probe(spec, map, target_index, levels, d, mc);
    ProbeResult r;
    r.name = std::string("completeness_") + to_string(map) + "_" + to_string(spec.family);
    r.seed = mc.rng.seed();
    r.passed = true;
    for (const auto& [n, est] : series) r.observed.push_back(est.mean[0]);
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double slack =
            2.0 * (series[k].second.std_error[0] + series[k + 1].second.std_error[0]);
        r.threshold.push_back(-slack);
        if (series[k + 1].second.mean[0] - series[k].second.mean[0] < -slack) r.passed = false;
    }
    r.detail = "p_i(n_{k+1}) - p_i(n_k) >= -2*(se_k + se_{k+1}) for consecutive levels";
    return r;
}

/// Both perturb maps must be bit-identical at theta and theta + c 1 when run
/// with the same seed: the testable form of translation non-identifiability.
inline ProbeResult translation_invariance_check(const Logits& theta, double c,
                                                const PerturbationSpec& spec, const McConfig& mc) {
    std::vector<double> shifted = theta.values();
    for (double& v : shifted) v += c;
    const Logits theta_c(std::move(shifted));

    const Estimate sm_a = perturb_softmax_mc(theta, spec, 1.0, mc);
    const Estimate sm_b = perturb_softmax_mc(theta_c, spec, 1.0, mc);
    const Estimate am_a = perturb_argmax_mc(theta, spec, mc);
    const Estimate am_b = perturb_argmax_mc(theta_c, spec, mc);

    auto max_diff = [](const Estimate& a, const Estimate& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.mean.size(); ++i) {
            m = std::max(m, std::abs(a.mean[i] - b.mean[i]));
            m = std::max(m, std::abs(a.std_error[i] - b.std_error[i]));
        }
        return m;
    };

    ProbeResult r;
    r.name = "translation_invariance";
    r.seed = mc.rng.seed();
    r.observed = {max_diff(sm_a, sm_b), max_diff(am_a, am_b)};
    r.threshold = {0.0, 0.0};
    r.passed = r.observed[0] == 0.0 && r.observed[1] == 0.0;
    std::ostringstream os;
    os << "bitwise equality of estimates at theta and theta + " << c << "*1, same seed";
    r.detail = os.str();
    return r;
}

namespace detail {

inline double potential_value(PotentialKind kind, std::span<const double> scores) {
    if (kind == PotentialKind::LogSumExp) return log_sum_exp(scores);
    double m = scores[0];
    for (double v : scores) m = std::max(m, v);
    return m;
}

}  // namespace detail

/// Second central difference of the chosen potential along v, with common
/// random numbers. Along the all-ones direction the potential is affine per
/// sample, so D2 vanishes to rounding; along any other direction strict
/// convexity demands D2 > 0 beyond the propagated noise.
inline ProbeResult strict_convexity_probe(const Logits& theta, const std::vector<double>& v,
                                          PotentialKind potential, const PerturbationSpec& spec,
                                          const McConfig& mc, double h) {
    if (v.size() != theta.size())
        throw std::invalid_argument("strict_convexity_probe: direction dimension mismatch");
    if (!(h > 0.0)) throw std::invalid_argument("strict_convexity_probe: h must be > 0");
    if (h < 1e-7)
        throw std::invalid_argument("strict_convexity_probe: h below 1e-7 loses the difference");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("strict_convexity_probe: bad direction");

    const std::size_t d = theta.size();
    std::vector<double> up = theta.values(), dn = theta.values();
    for (std::size_t i = 0; i < d; ++i) {
        up[i] += h * v[i];
        dn[i] -= h * v[i];
    }
    const std::vector<double>& th = theta.values();
    const pmax::detail::GammaLayout layout(spec, d);
    const double h2 = h * h;

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> g, s;
        g.resize(d);
        s.resize(d);
        layout.fill(cs, pos, g);
        auto eval = [&](const std::vector<double>& base) {
            for (std::size_t i = 0; i < d; ++i) s[i] = base[i] + g[i];
            return detail::potential_value(potential, s);
        };
        out[0] = (eval(up) - 2.0 * eval(th) + eval(dn)) / h2;
    };
    const Estimate est =
        pmax::detail::to_estimate(pmax::detail::chunked_mc(mc.rng, mc.n_samples, 1, kernel), mc);

    const double vmin = *std::min_element(v.begin(), v.end());
    const double vmax = *std::max_element(v.begin(), v.end());
    const bool affine_direction = vmin == vmax;

    ProbeResult r;
    r.name = std::string("strict_convexity_") + to_string(potential);
    r.seed = mc.rng.seed();
    r.observed = {est.scalar()};
    if (affine_direction) {
        r.threshold = {1e-9};
        r.passed = std::abs(est.scalar()) <= 1e-9;
        r.detail = "direction ~ all-ones: |D2| <= 1e-9";
    } else {
        r.threshold = {3.0 * est.scalar_se()};
        r.passed = est.scalar() > 3.0 * est.scalar_se();
        r.detail = "D2 > 3 * propagated std_error";
    }
    return r;
}

/// CRN central difference of the (temperature-scaled) expected log-sum-exp
/// against the Perturb-Softmax map at the same seed. The identity is exact
/// per shared sample; only O(h^2) truncation remains.
inline ProbeResult softmax_gradient_check(const Logits& theta, const PerturbationSpec& spec,
                                          double temperature, const McConfig& mc, double h) {
    if (!(h >= 1e-6 && h <= 1e-2))
        throw std::invalid_argument("softmax_gradient_check: h must lie in [1e-6, 1e-2]");
    if (!(temperature > 0.0))
        throw std::domain_error("softmax_gradient_check: temperature must be > 0");
    const std::size_t d = theta.size();
    const pmax::detail::GammaLayout layout(spec, d);

    // Potential whose gradient is the tau-tempered map:
    // P(theta) = tau * E[logsumexp((theta + gamma) / tau)].
    auto potential_mean = [&](const std::vector<double>& vals) {
        auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
            thread_local std::vector<double> s;
            s.resize(d);
            layout.fill(cs, pos, s);
            for (std::size_t i = 0; i < d; ++i) s[i] = (vals[i] + s[i]) / temperature;
            out[0] = temperature * log_sum_exp(s);
        };
        return pmax::detail::chunked_mc(mc.rng, mc.n_samples, 1, kernel).mean[0];
    };

    const Estimate map = perturb_softmax_mc(theta, spec, temperature, mc);
    double max_dev = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> up = theta.values(), dn = theta.values();
        up[j] += h;
        dn[j] -= h;
        const double fd = (potential_mean(up) - potential_mean(dn)) / (2.0 * h);
        max_dev = std::max(max_dev, std::abs(fd - map.mean[j]));
    }

    ProbeResult r;
    r.name = "softmax_gradient";
    r.seed = mc.rng.seed();
    r.observed = {max_dev};
    r.threshold = {10.0 * h * h + 1e-9};
    r.passed = max_dev <= r.threshold[0];
    r.detail = "max_j |CRN central difference of potential - map_j| <= 10 h^2 + 1e-9";
    return r;
}

/// CRN central difference of the expected max against the Perturb-Argmax
/// map. Samples whose argmax flips inside the +-h window are counted, not
/// assumed absent: each flip can bias a coordinate by at most 1/N.
inline ProbeResult argmax_gradient_check(const Logits& theta, const PerturbationSpec& spec,
                                         const McConfig& mc, double h) {
    if (spec.family == Family::TwoPointDiscrete)
        throw std::domain_error(
            "argmax_gradient_check: discrete perturbation has a sub-differential only");
    if (!(h > 0.0)) throw std::invalid_argument("argmax_gradient_check: h must be > 0");
    if (spec.family == Family::UniformSym) {
        // Keep theta off the kink set of the piecewise closed form.
        const auto& t = theta.values();
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j) {
                const double diff = t[i] - t[j];
                const double margin = std::min({std::abs(diff), std::abs(diff - 2.0 * spec.scale),
                                                std::abs(diff + 2.0 * spec.scale)});
                if (margin <= h)
                    throw std::invalid_argument(
                        "argmax_gradient_check: theta within h of a uniform-family kink");
            }
    }

    const std::size_t d = theta.size();
    const std::vector<double>& th = theta.values();
    const pmax::detail::GammaLayout layout(spec, d);
    const TieBreak policy = mc.tie_break;

    // Per sample: argmax indicator (d), per-coordinate FD (d), flip flag (1).
    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> g, s;
        g.resize(d);
        s.resize(d);
        layout.fill(cs, pos, g);
        for (std::size_t i = 0; i < d; ++i) s[i] = th[i] + g[i];
        const double tie_u =
            policy == TieBreak::RandomUniform ? layout.tie_unit(cs, pos) : 0.0;
        pmax::detail::argmax_weights(s, policy, tie_u, out.subspan(0, d));

        auto max_and_arg = [&](std::size_t bump, double delta, std::size_t& arg) {
            double best = -std::numeric_limits<double>::infinity();
            arg = 0;
            for (std::size_t i = 0; i < d; ++i) {
                const double v = s[i] + (i == bump ? delta : 0.0);
                if (v > best) {
                    best = v;
                    arg = i;
                }
            }
            return best;
        };
        bool flipped = false;
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t arg_up, arg_dn;
            const double up = max_and_arg(j, h, arg_up);
            const double dn = max_and_arg(j, -h, arg_dn);
            out[d + j] = (up - dn) / (2.0 * h);
            flipped = flipped || arg_up != arg_dn;
        }
        out[2 * d] = flipped ? 1.0 : 0.0;
    };
    const auto acc = pmax::detail::chunked_mc(mc.rng, mc.n_samples, 2 * d + 1, kernel);

    double max_dev = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        max_dev = std::max(max_dev, std::abs(acc.mean[d + j] - acc.mean[j]));
    const double flip_fraction = acc.mean[2 * d];
    const double bound = std::max(2.0 * flip_fraction, 1e-9);

    ProbeResult r;
    r.name = "argmax_gradient";
    r.seed = mc.rng.seed();
    r.observed = {max_dev, flip_fraction * static_cast<double>(acc.n)};
    r.threshold = {bound, static_cast<double>(acc.n)};
    r.passed = max_dev <= bound;
    r.detail = "max_j |FD_j - indicator_j| <= max(2 * flips / N, 1e-9); observed[1] = flips";
    return r;
}

/// Two parameters that are not translates of each other, (3,0) and (4,0),
/// both map to (1,0) under the 2-d uniform argmax: the map is onto the
/// simplex boundary but not one-to-one.
inline ProbeResult uniform2_noninjectivity_demo() {
    const std::vector<double> a{3.0, 0.0}, b{4.0, 0.0};
    const auto pa = exact::uniform2_argmax(a);
    const auto pb = exact::uniform2_argmax(b);

    ProbeResult r;
    r.name = "uniform2_noninjectivity";
    r.observed = {pa.value[0], pa.value[1], pb.value[0], pb.value[1]};
    r.threshold = {1.0, 0.0, 1.0, 0.0};
    const bool same_extreme = pa.value[0] == 1.0 && pa.value[1] == 0.0 && pb.value[0] == 1.0 &&
                              pb.value[1] == 0.0;
    const bool non_translation = (b[0] - a[0]) != (b[1] - a[1]);
    r.passed = same_extreme && non_translation;
    r.detail = "(3,0) and (4,0) both map to (1,0); their difference (1,0) is not constant";
    return r;
}

/// Sub-gradient membership of (p1, 1-p1) at theta = (0,0) for the discrete
/// family, decided by the directional-derivative inequality
/// grad_v f >= <p, v> on the eight compass directions, using the exact
/// piecewise expected max. Membership must hold exactly for p1 in [1/4, 3/4].
inline ProbeResult discrete2_multivalue_demo(double p1) {
    if (!(p1 >= 0.0 && p1 <= 1.0))
        throw std::domain_error("discrete2_multivalue_demo: p1 must lie in [0, 1]");
    const double f0 = exact::discrete2_expected_max(std::vector<double>{0.0, 0.0}).scalar();
    const double step = 0.5;  // stays inside the overlapping middle branches

    double min_slack = std::numeric_limits<double>::infinity();
    for (int v1 = -1; v1 <= 1; ++v1)
        for (int v2 = -1; v2 <= 1; ++v2) {
            if (v1 == 0 && v2 == 0) continue;
            const std::vector<double> at{step * v1, step * v2};
            const double dir_deriv = (exact::discrete2_expected_max(at).scalar() - f0) / step;
            const double inner = p1 * v1 + (1.0 - p1) * v2;
            min_slack = std::min(min_slack, dir_deriv - inner);
        }
    const bool member = min_slack >= 0.0;
    const bool expected_member = p1 >= 0.25 && p1 <= 0.75;

    ProbeResult r;
    r.name = "discrete2_multivalue";
    r.observed = {min_slack};
    r.threshold = {0.0};
    r.passed = member == expected_member;
    r.detail = member ? "member: grad_v f >= <p, v> on all compass directions"
                      : "not a member: some direction violates grad_v f >= <p, v>";
    return r;
}

}  // namespace pmax::probes
