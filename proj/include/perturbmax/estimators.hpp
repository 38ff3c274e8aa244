#pragma once

// Monte-Carlo estimators for the Perturb-Softmax and Perturb-Argmax maps and
// their convex potentials.
//
// Sampling is counter based: the perturbation matrix gamma[sample][coord] is
// a pure function of (seed, stream_index, sample index), carved into chunks
// of 4096 samples per substream. Workers own whole chunks and the per-chunk
// accumulators are merged in chunk order, so results are bit-identical for
// any thread count. Two estimator calls with the same RngStream consume the
// identical gamma sequence (common random numbers); this is what makes the
// finite-difference probes deterministic.
//
// The probability maps subtract max(theta) from the parameters up front.
// The maps are shift invariant, so this is a mathematical no-op, and it makes
// the invariance exact: translated inputs whose coordinate differences are
// preserved by floating-point produce bit-identical estimates.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "perturbmax/core.hpp"
#include "perturbmax/perturbation.hpp"
#include "perturbmax/rng.hpp"

namespace pmax {

inline constexpr std::uint64_t kChunkSamples = 4096;

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};  // 0 = hardware concurrency
    return cap;
}
}  // namespace detail

inline void set_max_threads(unsigned n) { detail::thread_cap().store(n); }
inline unsigned max_threads() {
    unsigned cap = detail::thread_cap().load();
    if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
    return cap;
}

enum class TieBreak { LowestIndex, SplitMass, RandomUniform };

inline const char* to_string(TieBreak t) {
    switch (t) {
        case TieBreak::LowestIndex: return "lowest_index";
        case TieBreak::SplitMass: return "split_mass";
        case TieBreak::RandomUniform: return "random_uniform";
    }
    return "?";
}

struct McConfig {
    std::uint64_t n_samples = 1;
    RngStream rng{0, 0};
    TieBreak tie_break = TieBreak::SplitMass;

    McConfig() = default;
    McConfig(std::uint64_t n, RngStream r, TieBreak t = TieBreak::SplitMass)
        : n_samples(n), rng(r), tie_break(t) {
        if (n_samples < 1) throw std::invalid_argument("McConfig: n_samples must be >= 1");
    }
};

/// Monte-Carlo mean with per-coordinate standard errors and the seed that
/// produced it. Scalar estimates are stored as length-1 vectors.
struct Estimate {
    std::vector<double> mean;
    std::vector<double> std_error;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;

    double scalar() const { return mean.at(0); }
    double scalar_se() const { return std_error.at(0); }
    ProbVector as_prob_vector() const { return ProbVector(mean); }
};

struct JacobianEstimate {
    std::size_t dim = 0;
    std::vector<double> mean;       // row-major d*d, entry (i,j) = d p_i / d theta_j
    std::vector<double> std_error;  // matching layout
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;

    double at(std::size_t i, std::size_t j) const { return mean[i * dim + j]; }
};

namespace detail {

// Welford accumulator over vectors, merged across chunks in index order.
struct Accum {
    std::uint64_t n = 0;
    std::vector<double> mean, m2;

    void init(std::size_t dim) {
        mean.assign(dim, 0.0);
        m2.assign(dim, 0.0);
        n = 0;
    }

    void update(std::span<const double> x) {
        ++n;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double delta = x[j] - mean[j];
            mean[j] += delta * inv_n;
            m2[j] += delta * (x[j] - mean[j]);
        }
    }

    void merge(const Accum& b) {
        if (b.n == 0) return;
        if (n == 0) {
            *this = b;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(b.n);
        const double nt = na + nb;
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double delta = b.mean[j] - mean[j];
            mean[j] += delta * (nb / nt);
            m2[j] += b.m2[j] + delta * delta * (na * nb / nt);
        }
        n += b.n;
    }
};

// Runs fn over n samples in 4096-sample chunks; chunk c draws from
// base.substream(c). Chunks are distributed over workers and merged in
// chunk order. fn(chunk_stream, pos_in_chunk, out) must be thread safe.
template <class Fn>
Accum chunked_mc(const RngStream& base, std::uint64_t n, std::size_t dim, const Fn& fn) {
    const std::uint64_t n_chunks = (n + kChunkSamples - 1) / kChunkSamples;
    std::vector<Accum> acc(n_chunks);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(max_threads(), n_chunks));

    auto run_range = [&](unsigned t, unsigned stride) {
        std::vector<double> out(dim);
        for (std::uint64_t c = t; c < n_chunks; c += stride) {
            const RngStream cs = base.substream(c);
            const std::uint64_t count = std::min<std::uint64_t>(kChunkSamples, n - c * kChunkSamples);
            Accum& a = acc[c];
            a.init(dim);
            for (std::uint64_t p = 0; p < count; ++p) {
                fn(cs, p, std::span<double>(out));
                a.update(out);
            }
        }
    };

    if (workers <= 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run_range, t, workers);
        for (auto& th : pool) th.join();
    }

    Accum total;
    total.init(dim);
    for (const Accum& a : acc) total.merge(a);
    return total;
}

inline Estimate to_estimate(const Accum& a, const McConfig& mc) {
    Estimate e;
    e.mean = a.mean;
    e.std_error.resize(a.mean.size());
    const double n = static_cast<double>(a.n);
    for (std::size_t j = 0; j < a.mean.size(); ++j)
        e.std_error[j] = a.n > 1 ? std::sqrt(a.m2[j] / (n - 1.0) / n) : 0.0;
    e.n_samples = a.n;
    e.seed = mc.rng.seed();
    return e;
}

// Fills gamma for the sample at pos within a chunk. Draw positions are
// strided so every sample owns a fixed budget (2 uniforms per coordinate for
// Normal, 1 otherwise, plus one reserved tie-break slot); the gamma sequence
// therefore never depends on theta or on the estimator consuming it.
struct GammaLayout {
    PerturbationSpec spec;
    std::size_t d;
    unsigned per_coord;
    std::uint64_t stride;

    GammaLayout(const PerturbationSpec& s, std::size_t dim)
        : spec(s), d(dim), per_coord(draws_per_coordinate(s)),
          stride(static_cast<std::uint64_t>(dim) * per_coord + 1) {}

    void fill(const RngStream& cs, std::uint64_t pos, std::span<double> gamma) const {
        const std::uint64_t base = pos * stride;
        for (std::size_t i = 0; i < d; ++i) {
            const double u1 = cs.unit_at(base + i * per_coord);
            const double u2 = per_coord == 2 ? cs.unit_at(base + i * per_coord + 1) : 0.0;
            gamma[i] = from_units(spec, u1, u2);
        }
    }

    double tie_unit(const RngStream& cs, std::uint64_t pos) const {
        return cs.unit_at(pos * stride + d * per_coord);
    }
};

// Argmax weights under a tie policy. Ties are exact floating-point equality
// of the perturbed scores; for continuous families the event has measure
// zero, for the discrete family it is where the sub-differential lives.
inline void argmax_weights(std::span<const double> scores, TieBreak policy, double tie_u,
                           std::span<double> w) {
    const std::size_t d = scores.size();
    double maxv = scores[0];
    for (std::size_t i = 1; i < d; ++i) maxv = std::max(maxv, scores[i]);
    std::size_t ties = 0;
    for (std::size_t i = 0; i < d; ++i) {
        w[i] = 0.0;
        if (scores[i] == maxv) ++ties;
    }
    switch (policy) {
        case TieBreak::LowestIndex:
            for (std::size_t i = 0; i < d; ++i)
                if (scores[i] == maxv) {
                    w[i] = 1.0;
                    return;
                }
            break;
        case TieBreak::SplitMass: {
            const double share = 1.0 / static_cast<double>(ties);
            for (std::size_t i = 0; i < d; ++i)
                if (scores[i] == maxv) w[i] = share;
            break;
        }
        case TieBreak::RandomUniform: {
            std::size_t pick = std::min<std::size_t>(
                ties - 1, static_cast<std::size_t>(tie_u * static_cast<double>(ties)));
            for (std::size_t i = 0; i < d; ++i)
                if (scores[i] == maxv && pick-- == 0) {
                    w[i] = 1.0;
                    return;
                }
            break;
        }
    }
}

inline std::vector<double> anchored(const Logits& theta) {
    std::vector<double> th = theta.values();
    const double m = *std::max_element(th.begin(), th.end());
    for (double& v : th) v -= m;
    return th;
}

}  // namespace detail

/// Mean of softmax((theta + gamma) / temperature) over n_samples draws.
/// Every sample is a simplex point, so the mean is too.
inline Estimate perturb_softmax_mc(const Logits& theta, const PerturbationSpec& spec,
                                   double temperature, const McConfig& mc) {
    if (!(temperature > 0.0))
        throw std::domain_error("perturb_softmax_mc: temperature must be > 0");
    const std::vector<double> th = detail::anchored(theta);
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> gamma;
        gamma.resize(d);
        layout.fill(cs, pos, gamma);
        double m = th[0] + gamma[0];
        for (std::size_t i = 1; i < d; ++i) m = std::max(m, th[i] + gamma[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            out[i] = std::exp((th[i] + gamma[i] - m) / temperature);
            sum += out[i];
        }
        for (std::size_t i = 0; i < d; ++i) out[i] /= sum;
    };
    return detail::to_estimate(detail::chunked_mc(mc.rng, mc.n_samples, d, kernel), mc);
}

/// Mean of the one-hot (or tie-split) indicator of argmax(theta + gamma).
inline Estimate perturb_argmax_mc(const Logits& theta, const PerturbationSpec& spec,
                                  const McConfig& mc) {
    const std::vector<double> th = detail::anchored(theta);
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);
    const TieBreak policy = mc.tie_break;

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> scores;
        scores.resize(d);
        layout.fill(cs, pos, scores);
        for (std::size_t i = 0; i < d; ++i) scores[i] += th[i];
        const double tie_u =
            policy == TieBreak::RandomUniform ? layout.tie_unit(cs, pos) : 0.0;
        detail::argmax_weights(scores, policy, tie_u, out);
    };
    return detail::to_estimate(detail::chunked_mc(mc.rng, mc.n_samples, d, kernel), mc);
}

/// Sample average of log_sum_exp(theta + gamma). Not shift invariant:
/// f(theta + c 1) = f(theta) + c, which is exactly what makes it the
/// potential whose gradient is the Perturb-Softmax map.
inline Estimate expected_logsumexp_mc(const Logits& theta, const PerturbationSpec& spec,
                                      const McConfig& mc) {
    const std::vector<double>& th = theta.values();
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> scores;
        scores.resize(d);
        layout.fill(cs, pos, scores);
        for (std::size_t i = 0; i < d; ++i) scores[i] += th[i];
        out[0] = log_sum_exp(scores);
    };
    return detail::to_estimate(detail::chunked_mc(mc.rng, mc.n_samples, 1, kernel), mc);
}

/// Sample average of max_i(theta_i + gamma_i).
inline Estimate expected_max_mc(const Logits& theta, const PerturbationSpec& spec,
                                const McConfig& mc) {
    const std::vector<double>& th = theta.values();
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> gamma;
        gamma.resize(d);
        layout.fill(cs, pos, gamma);
        double m = th[0] + gamma[0];
        for (std::size_t i = 1; i < d; ++i) m = std::max(m, th[i] + gamma[i]);
        out[0] = m;
    };
    return detail::to_estimate(detail::chunked_mc(mc.rng, mc.n_samples, 1, kernel), mc);
}

/// Mean pathwise Jacobian (1/tau) (diag(s) - s s^T) with
/// s = softmax((theta + gamma) / tau), the same-sample derivative of the
/// Perturb-Softmax map. Rows and columns of the mean sum to zero.
inline JacobianEstimate pathwise_softmax_jacobian_mc(const Logits& theta,
                                                     const PerturbationSpec& spec,
                                                     double temperature, const McConfig& mc) {
    if (!(temperature > 0.0))
        throw std::domain_error("pathwise_softmax_jacobian_mc: temperature must be > 0");
    const std::vector<double> th = detail::anchored(theta);
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);

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
        for (std::size_t i = 0; i < d; ++i) s[i] /= sum;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                out[i * d + j] = ((i == j ? s[i] : 0.0) - s[i] * s[j]) / temperature;
    };
    const detail::Accum a = detail::chunked_mc(mc.rng, mc.n_samples, d * d, kernel);
    const Estimate e = detail::to_estimate(a, mc);
    return JacobianEstimate{d, e.mean, e.std_error, e.n_samples, e.seed};
}

/// Mean of gamma at the argmax index of theta + gamma (tie policy applied as
/// a weighted average over tied coordinates).
inline Estimate expected_gamma_at_argmax_mc(const Logits& theta, const PerturbationSpec& spec,
                                            const McConfig& mc) {
    const std::vector<double>& th = theta.values();
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);
    const TieBreak policy = mc.tie_break;

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> gamma, scores, w;
        gamma.resize(d);
        scores.resize(d);
        w.resize(d);
        layout.fill(cs, pos, gamma);
        for (std::size_t i = 0; i < d; ++i) scores[i] = th[i] + gamma[i];
        const double tie_u =
            policy == TieBreak::RandomUniform ? layout.tie_unit(cs, pos) : 0.0;
        detail::argmax_weights(scores, policy, tie_u, w);
        double g = 0.0;
        for (std::size_t i = 0; i < d; ++i) g += w[i] * gamma[i];
        out[0] = g;
    };
    return detail::to_estimate(detail::chunked_mc(mc.rng, mc.n_samples, 1, kernel), mc);
}

/// On one shared sample set, |E[max] - <argmax weights, theta> - E[gamma at
/// argmax]|. The identity max(theta + gamma) = theta_i* + gamma_i* holds per
/// sample, so the gap is pure floating-point residue.
inline double fenchel_gap(const Logits& theta, const PerturbationSpec& spec, const McConfig& mc) {
    const std::vector<double>& th = theta.values();
    const std::size_t d = th.size();
    const detail::GammaLayout layout(spec, d);
    const TieBreak policy = mc.tie_break;

    auto kernel = [&](const RngStream& cs, std::uint64_t pos, std::span<double> out) {
        thread_local std::vector<double> gamma, scores;
        gamma.resize(d);
        scores.resize(d);
        layout.fill(cs, pos, gamma);
        for (std::size_t i = 0; i < d; ++i) scores[i] = th[i] + gamma[i];
        const double tie_u =
            policy == TieBreak::RandomUniform ? layout.tie_unit(cs, pos) : 0.0;
        detail::argmax_weights(scores, policy, tie_u, out.subspan(0, d));
        double maxv = scores[0];
        for (std::size_t i = 1; i < d; ++i) maxv = std::max(maxv, scores[i]);
        double g = 0.0;
        for (std::size_t i = 0; i < d; ++i) g += out[i] * gamma[i];
        out[d] = maxv;
        out[d + 1] = g;
    };
    const detail::Accum a = detail::chunked_mc(mc.rng, mc.n_samples, d + 2, kernel);
    double inner = 0.0;
    for (std::size_t i = 0; i < d; ++i) inner += a.mean[i] * th[i];
    return std::abs(a.mean[d] - inner - a.mean[d + 1]);
}

}  // namespace pmax
