#pragma once

// Closed-form and quadrature oracles.
//
// For a continuous perturbation with density g and cdf G, the probability
// that coordinate i maximizes theta + gamma is
//     p_i = integral over t of g(t - theta_i) * prod_{j != i} G(t - theta_j).
// For the zero-mean Gumbel family this collapses to softmax(theta) and the
// expected max collapses to log-sum-exp (the log-partition identity). For
// 2-d Uniform(+-1) and 2-d two-point(+-1) perturbations the expected max has
// piecewise closed forms, implemented here exactly as stated; other scales
// and dimensions route to quadrature or Monte Carlo.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perturbmax/core.hpp"
#include "perturbmax/perturbation.hpp"

namespace pmax::exact {

/// Which piecewise branch fired, plus its value (scalar values have size 1).
struct PiecewiseReport {
    std::string region;
    std::vector<double> value;

    double scalar() const { return value.at(0); }
};

/// Closed interval of probabilities; singleton when lo == hi.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval(double l, double h) : lo(l), hi(h) {
        if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
            throw std::invalid_argument("Interval: need 0 <= lo <= hi <= 1");
    }
    bool contains(double p) const { return lo <= p && p <= hi; }
    bool singleton() const { return lo == hi; }
};

struct QuadConfig {
    double abs_tol = 1e-8;
    double tail_mass = 1e-12;

    QuadConfig() = default;
    QuadConfig(double tol, double tail) : abs_tol(tol), tail_mass(tail) {
        if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw std::invalid_argument("QuadConfig: abs_tol in (0,1)");
        if (!(tail_mass > 0.0)) throw std::invalid_argument("QuadConfig: tail_mass > 0");
    }
};

/// Adaptive quadrature could not reach the requested tolerance within the
/// subdivision budget; carries the error bound it did achieve.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

/// Gumbel-Argmax probabilities: exactly softmax(theta) at temperature 1.
inline ProbVector gumbel_argmax_exact(std::span<const double> theta) {
    return softmax(theta, 1.0);
}

/// Expected max under zero-mean Gumbel perturbation: the log-partition
/// function log sum exp(theta).
inline double gumbel_expected_max_exact(std::span<const double> theta) {
    return log_sum_exp(theta);
}

namespace detail {

// Adaptive Simpson with a global subdivision budget shared across the call.
struct SimpsonState {
    long budget;
    double worst_interval_error = 0.0;
};

template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth, SimpsonState& st) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth > 0 && st.budget > 0 && std::abs(err) > tol) {
        st.budget -= 2;
        return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, st) +
               simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, st);
    }
    st.worst_interval_error = std::max(st.worst_interval_error, std::abs(err));
    return left + right + err;
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, SimpsonState& st) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48, st);
}

}  // namespace detail

/// Per-coordinate argmax probabilities for a continuous family, by adaptive
/// 1-d quadrature of pdf(t - theta_i) * prod_{j != i} cdf(t - theta_j) over
/// [L, U], with L, U placed so every factor's omitted tail mass is below
/// tail_mass. The Uniform integrand is piecewise polynomial with kinks at
/// every theta_j +- scale; the interval is split there before adapting.
inline ProbVector smooth_argmax_quadrature(std::span<const double> theta,
                                           const PerturbationSpec& spec,
                                           const QuadConfig& quad = QuadConfig()) {
    if (!spec.continuous())
        throw std::domain_error("smooth_argmax_quadrature: discrete family has no density");
    if (spec.family == Family::UniformSym && spec.scale == 0.0)
        throw std::domain_error("smooth_argmax_quadrature: degenerate uniform (scale 0)");
    const std::size_t d = theta.size();
    if (d < 1) throw std::invalid_argument("smooth_argmax_quadrature: empty theta");

    const double qlo = family_quantile(spec, quad.tail_mass);
    const double qhi = family_quantile(spec, 1.0 - quad.tail_mass);
    const double lo = *std::min_element(theta.begin(), theta.end()) + qlo;
    const double hi = *std::max_element(theta.begin(), theta.end()) + qhi;

    // Segment boundaries: kinks of the uniform box density / ramped cdf.
    std::vector<double> cuts{lo, hi};
    if (spec.family == Family::UniformSym) {
        for (double t : theta)
            for (double b : {t - spec.scale, t + spec.scale})
                if (b > lo && b < hi) cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }

    detail::SimpsonState st{1 << 20};
    std::vector<double> p(d);
    const double seg_tol = quad.abs_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i < d; ++i) {
        auto integrand = [&](double t) {
            double v = family_pdf(spec, t - theta[i]);
            if (v == 0.0) return 0.0;
            for (std::size_t j = 0; j < d; ++j)
                if (j != i) v *= family_cdf(spec, t - theta[j]);
            return v;
        };
        double total = 0.0;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
            total += detail::adaptive_simpson(integrand, cuts[s], cuts[s + 1], seg_tol, st);
        p[i] = total;
        if (st.budget <= 0 && st.worst_interval_error > seg_tol)
            throw quadrature_error("smooth_argmax_quadrature: subdivision budget exhausted",
                                   st.worst_interval_error);
    }

    double sum = 0.0;
    for (double v : p) sum += v;
    if (std::abs(sum - 1.0) > 10.0 * quad.abs_tol)
        throw quadrature_error("smooth_argmax_quadrature: coordinate integrals sum to " +
                                   std::to_string(sum),
                               std::abs(sum - 1.0));
    for (double& v : p) v /= sum;
    return ProbVector(std::move(p));
}

/// Density of the difference of two independent Uniform(-1, 1) draws: the
/// triangular law (2 - |z|) / 4 on [-2, 2].
inline double uniform_diff_pdf(double z) {
    const double az = std::abs(z);
    return az <= 2.0 ? (2.0 - az) / 4.0 : 0.0;
}

namespace detail {
inline void require_dim2(std::span<const double> theta, const char* who) {
    if (theta.size() != 2)
        throw std::invalid_argument(std::string(who) + ": dimension must be exactly 2");
}
}  // namespace detail

/// Expected max of theta + gamma for 2-d Uniform(-1, 1) perturbations, as a
/// four-branch piecewise cubic in th = theta_1 - theta_2. Continuous at the
/// branch joints th in {-2, 0, 2}.
inline PiecewiseReport uniform2_expected_max(std::span<const double> theta) {
    detail::require_dim2(theta, "uniform2_expected_max");
    const double th = theta[0] - theta[1];
    const double lin = 2.0 * (theta[0] + theta[1]);
    if (th > 2.0) return {"theta > 2", {theta[0]}};
    if (th >= 0.0)
        return {"2 >= theta >= 0",
                {0.25 * (4.0 / 3.0 + lin + th * th - th * th * th / 6.0)}};
    if (th >= -2.0)
        return {"0 >= theta >= -2",
                {0.25 * (4.0 / 3.0 + lin + th * th + th * th * th / 6.0)}};
    return {"theta < -2", {theta[1]}};
}

/// Argmax probabilities for the same setting: the analytic derivative of
/// uniform2_expected_max, branch by branch.
inline PiecewiseReport uniform2_argmax(std::span<const double> theta) {
    detail::require_dim2(theta, "uniform2_argmax");
    const double th = theta[0] - theta[1];
    if (th > 2.0) return {"theta > 2", {1.0, 0.0}};
    if (th >= 0.0) {
        const double p1 = 0.5 + 0.5 * th - th * th / 8.0;
        return {"2 >= theta >= 0", {p1, 1.0 - p1}};
    }
    if (th >= -2.0) {
        const double p1 = 0.5 + 0.5 * th + th * th / 8.0;
        return {"0 >= theta >= -2", {p1, 1.0 - p1}};
    }
    return {"theta < -2", {0.0, 1.0}};
}

/// Expected max of theta + gamma for 2-d two-point(+-1) perturbations:
/// piecewise linear, kinked where branches overlap.
inline PiecewiseReport discrete2_expected_max(std::span<const double> theta) {
    detail::require_dim2(theta, "discrete2_expected_max");
    const double t1 = theta[0], t2 = theta[1];
    if (t1 >= t2 + 2.0) return {"theta1 >= theta2+2", {t1}};
    if (t1 >= t2) return {"theta2+2 >= theta1 >= theta2", {0.75 * t1 + 0.25 * t2 + 0.5}};
    if (t1 >= t2 - 2.0) return {"theta2-2 <= theta1 <= theta2", {0.75 * t2 + 0.25 * t1 + 0.5}};
    return {"theta1 <= theta2-2", {t2}};
}

/// First coordinate of the sub-differential of the 2-d discrete expected
/// max: the seven-case map, interval-valued exactly on the overlap lines.
inline Interval discrete2_argmax_subdifferential(std::span<const double> theta) {
    detail::require_dim2(theta, "discrete2_argmax_subdifferential");
    const double gap = theta[0] - theta[1];
    if (gap > 2.0) return {1.0, 1.0};
    if (gap == 2.0) return {0.75, 1.0};
    if (gap > 0.0) return {0.75, 0.75};
    if (gap == 0.0) return {0.25, 0.75};
    if (gap > -2.0) return {0.25, 0.25};
    if (gap == -2.0) return {0.0, 0.25};
    return {0.0, 0.0};
}

}  // namespace pmax::exact
