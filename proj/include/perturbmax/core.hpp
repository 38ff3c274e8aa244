#pragma once

// Foundational numeric types for perturbation probability models: parameter
// vectors with an attached parameter-space tag, points on the probability
// simplex, and the stable log-sum-exp / softmax primitives everything else
// is built from.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmax {

/// Euler-Mascheroni constant; the zero-mean Gumbel family is shifted by it.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

enum class ParamSpace { Free, FirstAnchored, ZeroSum };

inline const char* to_string(ParamSpace s) {
    switch (s) {
        case ParamSpace::Free: return "free";
        case ParamSpace::FirstAnchored: return "first_anchored";
        case ParamSpace::ZeroSum: return "zero_sum";
    }
    return "?";
}

/// log(sum_i exp(x[i])), computed with a max shift so it never overflows for
/// |x[i]| <= 700. Empty input is a dimension error.
inline double log_sum_exp(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    const double m = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& x) {
    return log_sum_exp(std::span<const double>(x));
}

/// A point on the d-simplex. Construction clamps tiny negative entries
/// (>= -1e-12, floating-point rounding) to zero and rejects anything worse;
/// the coordinate sum must be within 1e-9 of one.
class ProbVector {
public:
    explicit ProbVector(std::vector<double> p) : probs_(std::move(p)) {
        if (probs_.empty()) throw std::invalid_argument("ProbVector: empty");
        double sum = 0.0;
        for (double& v : probs_) {
            if (!std::isfinite(v)) throw std::invalid_argument("ProbVector: non-finite entry");
            if (v < -1e-12 || v > 1.0 + 1e-9)
                throw std::invalid_argument("ProbVector: entry outside [0, 1]: " + std::to_string(v));
            v = std::clamp(v, 0.0, 1.0);
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("ProbVector: coordinates sum to " + std::to_string(sum));
    }

    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

/// softmax(x / temperature) via max shift with a fixed reduction order.
/// Subtracting the max first keeps the map exactly shift invariant: inputs
/// that differ by a representable constant produce bit-identical output.
inline ProbVector softmax(std::span<const double> x, double temperature = 1.0) {
    if (x.empty()) throw std::invalid_argument("softmax: empty input");
    if (!(temperature > 0.0)) throw std::domain_error("softmax: temperature must be > 0");
    const double m = *std::max_element(x.begin(), x.end());
    std::vector<double> e(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        e[i] = std::exp((x[i] - m) / temperature);
        sum += e[i];
    }
    for (double& v : e) v /= sum;
    return ProbVector(std::move(e));
}

inline ProbVector softmax(const std::vector<double>& x, double temperature = 1.0) {
    return softmax(std::span<const double>(x), temperature);
}

/// Projects raw parameter values onto the requested space:
/// Free is the identity, FirstAnchored subtracts values[0], ZeroSum subtracts
/// the mean. All three are shifts by a constant, so the softmax is unchanged.
inline std::vector<double> canonicalize(std::span<const double> values, ParamSpace space) {
    std::vector<double> out(values.begin(), values.end());
    switch (space) {
        case ParamSpace::Free:
            break;
        case ParamSpace::FirstAnchored: {
            const double a = out[0];
            for (double& v : out) v -= a;
            break;
        }
        case ParamSpace::ZeroSum: {
            double mean = 0.0;
            for (double v : out) mean += v;
            mean /= static_cast<double>(out.size());
            for (double& v : out) v -= mean;
            break;
        }
    }
    return out;
}

/// Parameter vector theta with its space tag. Construction validates the
/// space invariant exactly as stated (it does not silently project; use
/// Logits::canonicalized or pmax::canonicalize for that).
class Logits {
public:
    Logits(std::vector<double> values, ParamSpace space = ParamSpace::Free)
        : values_(std::move(values)), space_(space) {
        if (values_.size() < 2) throw std::invalid_argument("Logits: need dimension >= 2");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("Logits: non-finite entry");
        if (space_ == ParamSpace::FirstAnchored && values_[0] != 0.0)
            throw std::invalid_argument("Logits: first-anchored space requires values[0] == 0");
        if (space_ == ParamSpace::ZeroSum) {
            double sum = 0.0;
            for (double v : values_) sum += v;
            if (std::abs(sum) > 1e-12 * static_cast<double>(values_.size()))
                throw std::invalid_argument("Logits: zero-sum space requires a zero coordinate sum");
        }
    }

    /// Projects first, then constructs; always yields a valid member of `space`.
    static Logits canonicalized(std::span<const double> values, ParamSpace space) {
        return Logits(canonicalize(values, space), space);
    }

    const std::vector<double>& values() const { return values_; }
    ParamSpace space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
    ParamSpace space_;
};

/// Re-projects a Logits onto its own space tag. Idempotent.
inline Logits canonicalize(const Logits& theta) {
    return Logits(canonicalize(std::span<const double>(theta.values()), theta.space()),
                  theta.space());
}

}  // namespace pmax
