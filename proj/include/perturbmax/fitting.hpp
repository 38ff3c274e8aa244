#pragma once

// L1 distribution fitting: approximate a discrete target pmf with a
// Perturb-Softmax model trained by Adam, comparing perturbation families.
// Targets with countably infinite support are truncated to a finite
// dimension and renormalized.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "perturbmax/core.hpp"
#include "perturbmax/estimators.hpp"

namespace pmax::fitting {

struct Binomial {
    int trials;
    double p;
};
struct Poisson {
    double lambda;
    int dim;  // truncation
};
struct NegBinomial {
    double r;
    double p;
    int dim;  // truncation
};
struct Explicit {
    std::vector<double> weights;
};

using TargetDistribution = std::variant<Binomial, Poisson, NegBinomial, Explicit>;

inline std::string target_label(const TargetDistribution& t) {
    if (std::holds_alternative<Binomial>(t)) return "binomial";
    if (std::holds_alternative<Poisson>(t)) return "poisson";
    if (std::holds_alternative<NegBinomial>(t)) return "negative_binomial";
    return "explicit";
}

/// Exact pmf on {0, ..., d-1}; truncated kinds are renormalized and flag
/// whether the truncation captured less than 99% of the mass.
struct TargetPmf {
    ProbVector probs;
    double captured_mass;    // mass on the support before renormalization
    bool low_mass_warning;   // captured_mass < 0.99
};

inline TargetPmf target_pmf(const TargetDistribution& target) {
    std::vector<double> log_p;
    bool truncated = false;

    if (const auto* b = std::get_if<Binomial>(&target)) {
        if (b->trials < 1 || !(b->p > 0.0 && b->p < 1.0))
            throw std::domain_error("target_pmf: binomial needs trials >= 1 and 0 < p < 1");
        const double n = b->trials;
        log_p.resize(b->trials + 1);
        for (int k = 0; k <= b->trials; ++k)
            log_p[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                       k * std::log(b->p) + (n - k) * std::log1p(-b->p);
    } else if (const auto* po = std::get_if<Poisson>(&target)) {
        if (!(po->lambda > 0.0) || po->dim < 2)
            throw std::domain_error("target_pmf: poisson needs lambda > 0 and dim >= 2");
        truncated = true;
        log_p.resize(po->dim);
        for (int k = 0; k < po->dim; ++k)
            log_p[k] = k * std::log(po->lambda) - po->lambda - std::lgamma(k + 1.0);
    } else if (const auto* nb = std::get_if<NegBinomial>(&target)) {
        if (!(nb->r > 0.0) || !(nb->p > 0.0 && nb->p < 1.0) || nb->dim < 2)
            throw std::domain_error("target_pmf: negative binomial needs r > 0, 0 < p < 1, dim >= 2");
        truncated = true;
        log_p.resize(nb->dim);
        for (int k = 0; k < nb->dim; ++k)
            log_p[k] = std::lgamma(k + nb->r) - std::lgamma(nb->r) - std::lgamma(k + 1.0) +
                       nb->r * std::log(nb->p) + k * std::log1p(-nb->p);
    } else {
        const auto& w = std::get<Explicit>(target).weights;
        if (w.size() < 2) throw std::domain_error("target_pmf: explicit weights need size >= 2");
        double sum = 0.0;
        for (double v : w) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::domain_error("target_pmf: explicit weights must be non-negative");
            sum += v;
        }
        if (!(sum > 0.0)) throw std::domain_error("target_pmf: explicit weights sum to zero");
        std::vector<double> p(w);
        for (double& v : p) v /= sum;
        return {ProbVector(std::move(p)), 1.0, false};
    }

    // Exponentiate and track the true captured mass before renormalizing.
    std::vector<double> p(log_p.size());
    double mass = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = std::exp(log_p[k]);
        mass += p[k];
    }
    for (double& v : p) v /= mass;
    const double captured = truncated ? mass : 1.0;
    return {ProbVector(std::move(p)), captured, truncated && captured < 0.99};
}

/// L1 distance between pmf vectors; lies in [0, 2].
inline double l1_loss(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("l1_loss: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

inline double l1_loss(const ProbVector& p, const ProbVector& q) {
    return l1_loss(std::span<const double>(p.probs()), std::span<const double>(q.probs()));
}

namespace detail {

inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Batch estimate of the model pmf together with the L1 gradient through the
// pathwise Jacobian, contracted per sample:
//   g_j = mean_k (1/tau) s_j (sign_j - <sign, s>),  s = softmax((theta+gamma)/tau).
// The contraction equals sign(p_hat - q)^T J_hat on the same batch.
struct BatchGradient {
    Estimate model;
    std::vector<double> grad;
};

inline BatchGradient l1_batch_gradient(const Logits& theta, std::span<const double> target,
                                       const PerturbationSpec& spec, double temperature,
                                       const McConfig& mc) {
    const Estimate model = perturb_softmax_mc(theta, spec, temperature, mc);
    const std::size_t d = theta.size();
    if (target.size() != d) throw std::invalid_argument("l1 gradient: target length mismatch");

    std::vector<double> sign(d);
    for (std::size_t i = 0; i < d; ++i) sign[i] = sign0(model.mean[i] - target[i]);

    const std::vector<double> th = pmax::detail::anchored(theta);
    const pmax::detail::GammaLayout layout(spec, d);
    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> s;
        s.resize(d);
        layout.fill(cs, pos, s);
        double m = th[0] + s[0];
        for (std::size_t i = 1; i < d; ++i) m = std::max(m, th[i] + s[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s[i] = std::exp((th[i] + s[i] - m) / temperature);
            sum += s[i];
        }
        double inner = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s[i] /= sum;
            inner += sign[i] * s[i];
        }
        for (std::size_t j = 0; j < d; ++j) out[j] = s[j] * (sign[j] - inner) / temperature;
    };
    const auto acc = pmax::detail::chunked_mc(mc.rng, mc.n_samples, d, kernel);
    return {model, acc.mean};
}

}  // namespace detail

/// Gradient of the batch L1 objective at theta, with sign(0) = 0.
inline std::vector<double> l1_gradient_mc(const Logits& theta, const ProbVector& target,
                                          const PerturbationSpec& spec, double temperature,
                                          const McConfig& mc) {
    return detail::l1_batch_gradient(theta, target.probs(), spec, temperature, mc).grad;
}

enum class InitKind { UniformConstant, Seeded };
enum class ObjectiveMode { ExactPmf, EmpiricalHistogram };

inline const char* to_string(ObjectiveMode m) {
    return m == ObjectiveMode::ExactPmf ? "exact_pmf" : "empirical_histogram";
}

struct InitSpec {
    InitKind kind = InitKind::UniformConstant;
    double noise_scale = 0.1;  // Seeded only
};

struct FitConfig {
    TargetDistribution target = Explicit{{0.5, 0.5}};
    PerturbationSpec spec{};
    double temperature = 1.0;
    double lr = 1e-2;
    int iters = 300;
    int batch = 256;  // perturbation samples per step
    InitSpec init{};
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    ObjectiveMode objective = ObjectiveMode::ExactPmf;
    int target_samples = 1000;  // EmpiricalHistogram only
    ParamSpace space = ParamSpace::Free;
    std::uint64_t eval_samples = 65536;  // final model estimate

    void validate() const {
        if (!(temperature > 0.0) || !(lr >= 0.0) || iters < 1 || batch < 1 ||
            !(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
            !(adam_eps > 0.0) || target_samples < 1 || eval_samples < 1)
            throw std::invalid_argument("FitConfig: invalid field");
    }
};

/// Iteration-indexed batch L1 history plus the final parameters, a
/// high-precision estimate of the final model pmf, and its L1 to the target.
struct FitTrace {
    std::vector<double> losses;
    Logits theta_final;
    ProbVector model_final;
    double final_l1 = 0.0;
    FitConfig config;
};

class fit_divergence_error : public std::runtime_error {
public:
    fit_divergence_error(int step)
        : std::runtime_error("fit: non-finite parameters at step " + std::to_string(step)),
          step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

namespace detail {

// Stream layout within a fit's seed. Estimators consume one substream per
// 4096-sample chunk starting at their base stream, so the bases are spread
// far apart to keep every consumer on disjoint streams.
inline constexpr std::uint64_t kBatchStreamBase = 16;
inline constexpr std::uint64_t kEvalStream = std::uint64_t(1) << 32;
inline constexpr std::uint64_t kHistStream = std::uint64_t(2) << 32;
inline constexpr std::uint64_t kInitStream = std::uint64_t(3) << 32;

inline std::vector<double> objective_pmf(const FitConfig& cfg, const TargetPmf& exact) {
    if (cfg.objective == ObjectiveMode::ExactPmf) return exact.probs.probs();
    // Histogram of target_samples draws from the exact pmf.
    const std::vector<double>& p = exact.probs.probs();
    std::vector<double> cum(p.size());
    double run = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        run += p[i];
        cum[i] = run;
    }
    cum.back() = 1.0;
    RngStream rng(cfg.seed, kHistStream);
    std::vector<double> hist(p.size(), 0.0);
    for (int s = 0; s < cfg.target_samples; ++s) {
        const double u = rng.next_unit();
        const std::size_t k =
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
        hist[std::min(k, p.size() - 1)] += 1.0;
    }
    for (double& v : hist) v /= static_cast<double>(cfg.target_samples);
    return hist;
}

inline void project_gradient(std::vector<double>& g, ParamSpace space) {
    switch (space) {
        case ParamSpace::Free:
            break;
        case ParamSpace::FirstAnchored:
            g[0] = 0.0;
            break;
        case ParamSpace::ZeroSum: {
            double mean = 0.0;
            for (double v : g) mean += v;
            mean /= static_cast<double>(g.size());
            for (double& v : g) v -= mean;
            break;
        }
    }
}

}  // namespace detail

/// Runs Adam on the batch L1 objective with a fresh deterministic
/// perturbation batch per step. The recorded loss at each step uses the same
/// batch's model estimate. Deterministic for a fixed config.
inline FitTrace fit(const FitConfig& config,
                    const std::function<void(int, std::span<const double>)>& observer = {}) {
    config.validate();
    const TargetPmf exact = target_pmf(config.target);
    const std::vector<double> q = detail::objective_pmf(config, exact);
    const std::size_t d = q.size();

    std::vector<double> theta(d, 0.0);
    if (config.init.kind == InitKind::Seeded) {
        RngStream rng(config.seed, detail::kInitStream);
        const PerturbationSpec noise(Family::StandardNormal);
        const std::vector<double> z = sample_perturbation(noise, d, rng);
        for (std::size_t i = 0; i < d; ++i) theta[i] = config.init.noise_scale * z[i];
    }
    theta = canonicalize(theta, config.space);

    // Batches larger than one chunk span several substreams; keep steps on
    // disjoint stream ranges.
    const std::uint64_t chunks_per_step =
        (static_cast<std::uint64_t>(config.batch) + kChunkSamples - 1) / kChunkSamples;

    std::vector<double> m(d, 0.0), v(d, 0.0), losses;
    losses.reserve(config.iters);
    for (int step = 0; step < config.iters; ++step) {
        const McConfig mc(static_cast<std::uint64_t>(config.batch),
                          RngStream(config.seed, detail::kBatchStreamBase +
                                                     static_cast<std::uint64_t>(step) * chunks_per_step));
        const Logits cur(theta, config.space);
        auto bg = detail::l1_batch_gradient(cur, q, config.spec, config.temperature, mc);
        losses.push_back(l1_loss(bg.model.as_prob_vector().probs(), q));

        detail::project_gradient(bg.grad, config.space);
        const double t = static_cast<double>(step + 1);
        const double bc1 = 1.0 - std::pow(config.adam_beta1, t);
        const double bc2 = 1.0 - std::pow(config.adam_beta2, t);
        for (std::size_t i = 0; i < d; ++i) {
            m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * bg.grad[i];
            v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * bg.grad[i] * bg.grad[i];
            theta[i] -= config.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + config.adam_eps);
        }
        for (double x : theta)
            if (!std::isfinite(x)) throw fit_divergence_error(step);
        theta = canonicalize(theta, config.space);
        for (double x : theta)
            if (!std::isfinite(x)) throw fit_divergence_error(step);
        if (observer) observer(step, theta);
    }

    const Logits theta_final(theta, config.space);
    const McConfig eval_mc(config.eval_samples, RngStream(config.seed, detail::kEvalStream));
    const ProbVector model_final =
        perturb_softmax_mc(theta_final, config.spec, config.temperature, eval_mc).as_prob_vector();
    const double final_l1 = l1_loss(model_final.probs(), q);
    return FitTrace{std::move(losses), theta_final, model_final, final_l1, config};
}

struct ComparisonRow {
    std::string target;
    std::string family;
    double mean_l1 = 0.0;
    double std_l1 = 0.0;
    int repeats = 0;
    std::uint64_t seed_base = 0;
};

/// One fit per (target, family, repeat); repeat r uses seed base + r.
/// Reports mean and sample standard deviation of the final L1.
inline std::vector<ComparisonRow> compare_families(const std::vector<TargetDistribution>& targets,
                                                   const std::vector<PerturbationSpec>& specs,
                                                   int repeats, const FitConfig& base) {
    if (repeats < 1) throw std::invalid_argument("compare_families: repeats must be >= 1");
    std::vector<ComparisonRow> rows;
    for (const auto& target : targets) {
        for (const auto& spec : specs) {
            std::vector<double> finals;
            finals.reserve(repeats);
            for (int r = 0; r < repeats; ++r) {
                FitConfig cfg = base;
                cfg.target = target;
                cfg.spec = spec;
                cfg.seed = base.seed + static_cast<std::uint64_t>(r);
                finals.push_back(fit(cfg).final_l1);
            }
            double mean = 0.0;
            for (double x : finals) mean += x;
            mean /= static_cast<double>(repeats);
            double var = 0.0;
            for (double x : finals) var += (x - mean) * (x - mean);
            const double sd = repeats > 1 ? std::sqrt(var / (repeats - 1.0)) : 0.0;
            rows.push_back({target_label(target), to_string(spec.family), mean, sd, repeats,
                            base.seed});
        }
    }
    return rows;
}

/// CSV with '.' decimals, ',' delimiter, header row, LF line endings.
inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "target,family,mean_l1,std_l1,repeats,seed_base\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%d,%llu\n", r.target.c_str(),
                      r.family.c_str(), r.mean_l1, r.std_l1, r.repeats,
                      static_cast<unsigned long long>(r.seed_base));
        out += buf;
    }
    return out;
}

/// CSV trace of the per-step batch losses.
inline std::string trace_csv(const FitTrace& trace) {
    std::string out = "step,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.losses.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, trace.losses[i]);
        out += buf;
    }
    return out;
}

}  // namespace pmax::fitting
