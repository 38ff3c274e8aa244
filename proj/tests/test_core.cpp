#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "perturbmax/core.hpp"
#include "perturbmax/json_io.hpp"
#include "perturbmax/perturbation.hpp"
#include "perturbmax/rng.hpp"

using namespace pmax;

namespace {

// Independent oracle: naive evaluation, safe at small magnitudes.
double naive_logsumexp(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += std::exp(v);
    return std::log(s);
}

struct MeanSd {
    double mean;
    double sd;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return {m, std::sqrt(v / (static_cast<double>(xs.size()) - 1.0))};
}

}  // namespace

TEST_CASE("log_sum_exp basic values") {
    CHECK(log_sum_exp(std::vector<double>{0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) ==
          doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));

    const std::vector<double> x{0.3, -1.2, 2.0};
    CHECK(std::abs(log_sum_exp(x) - naive_logsumexp(x)) < 1e-12);

    CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("softmax values and temperature") {
    const auto p = softmax(std::vector<double>{0.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto q = softmax(std::vector<double>{std::log(2.0), 0.0});
    CHECK(q[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(q[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const std::vector<double> x{1.0, 2.0, 3.0};
    const auto r = softmax(x);
    // Direct evaluation of exp(x_i) / sum_j exp(x_j).
    double z = 0.0;
    for (double v : x) z += std::exp(v);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(r[i] == doctest::Approx(std::exp(x[i]) / z).epsilon(1e-14));
    CHECK(r[0] == doctest::Approx(0.09003057317038046).epsilon(1e-9));
    CHECK(r[1] == doctest::Approx(0.24472847105479764).epsilon(1e-9));
    CHECK(r[2] == doctest::Approx(0.66524095577482190).epsilon(1e-9));

    CHECK_THROWS_AS(softmax(x, 0.0), std::domain_error);
    CHECK_THROWS_AS(softmax(x, -1.0), std::domain_error);

    // Temperature scales the logits before normalization.
    const auto cold = softmax(x, 0.5);
    const auto manual = softmax(std::vector<double>{2.0, 4.0, 6.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(cold[i] == doctest::Approx(manual[i]).epsilon(1e-14));
}

TEST_CASE("softmax stays on the simplex at extreme logits") {
    const auto p = softmax(std::vector<double>{700.0, -700.0, 0.0});
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p[i] >= 0.0);
        CHECK(p[i] <= 1.0);
        sum += p[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax shift invariance is exact for representable shifts") {
    // Dyadic entries keep theta + c exactly representable.
    const std::vector<double> theta{0.25, -1.5, 3.0, 0.0078125};
    for (double c : {-100.0, 0.5, 100.0}) {
        std::vector<double> shifted = theta;
        for (double& v : shifted) v += c;
        const auto a = softmax(theta);
        const auto b = softmax(shifted);
        for (std::size_t i = 0; i < theta.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("ProbVector clamps rounding noise and rejects violations") {
    const ProbVector ok(std::vector<double>{0.5, 0.5 + 5e-13, -5e-13});
    CHECK(ok[2] == 0.0);
    CHECK_THROWS_AS(ProbVector(std::vector<double>{0.5, 0.5, -1e-6}), std::invalid_argument);
    CHECK_THROWS_AS(ProbVector(std::vector<double>{0.6, 0.6}), std::invalid_argument);
}

TEST_CASE("canonicalize projects onto each space") {
    const std::vector<double> raw{3.0, 4.0, 5.0};
    const auto fa = canonicalize(raw, ParamSpace::FirstAnchored);
    CHECK(fa == std::vector<double>{0.0, 1.0, 2.0});
    const auto zs = canonicalize(raw, ParamSpace::ZeroSum);
    CHECK(zs == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(canonicalize(raw, ParamSpace::Free) == raw);

    // Shift invariance of softmax under canonicalization, and idempotence.
    RngStream rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> theta(5);
        for (double& v : theta) v = 6.0 * rng.next_unit() - 3.0;
        for (auto space : {ParamSpace::FirstAnchored, ParamSpace::ZeroSum}) {
            const auto canon = canonicalize(theta, space);
            const auto twice = canonicalize(canon, space);
            for (std::size_t i = 0; i < canon.size(); ++i)
                CHECK(std::abs(canon[i] - twice[i]) < 1e-14);
            const auto a = softmax(theta);
            const auto b = softmax(canon);
            for (std::size_t i = 0; i < canon.size(); ++i)
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("Logits validates dimension, finiteness, and space membership") {
    CHECK_THROWS_AS(Logits(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Logits(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(Logits(std::vector<double>({1.0, 2.0}), ParamSpace::FirstAnchored),
                    std::invalid_argument);
    CHECK_THROWS_AS(Logits(std::vector<double>({1.0, 2.0}), ParamSpace::ZeroSum),
                    std::invalid_argument);
    const Logits ok = Logits::canonicalized(std::vector<double>{1.0, 2.0}, ParamSpace::ZeroSum);
    CHECK(ok.values()[0] == doctest::Approx(-0.5));
    CHECK(ok.values()[1] == doctest::Approx(0.5));
}

TEST_CASE("RngStream is counter-based and reproducible") {
    RngStream a(123, 7);
    RngStream b(123, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_unit() == b.next_unit());

    RngStream c(123, 7);
    CHECK(c.unit_at(40) == [&] { RngStream d(123, 7); for (int i = 0; i < 40; ++i) d.next_unit(); return d.next_unit(); }());

    RngStream e(123, 8);
    bool any_diff = false;
    for (int i = 0; i < 10; ++i) any_diff = any_diff || (RngStream(123, 7).unit_at(i) != e.unit_at(i));
    CHECK(any_diff);

    for (int i = 0; i < 1000; ++i) {
        const double u = RngStream(99, 0).unit_at(i);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("sample means are zero for every family") {
    const std::size_t n = 1000000;
    SUBCASE("gumbel zero mean") {
        RngStream rng(1);
        const auto draws = sample_perturbation(PerturbationSpec(Family::GumbelZeroMean), n, rng);
        const auto [m, sd] = mean_sd(draws);
        CHECK(std::abs(m) < 0.005);
        CHECK(std::abs(m) < 4.0 * sd / std::sqrt(static_cast<double>(n)));
    }
    SUBCASE("normal, uniform, discrete zero mean within 4 standard errors") {
        int stream = 0;
        for (auto family : {Family::StandardNormal, Family::UniformSym, Family::TwoPointDiscrete}) {
            RngStream rng(2, ++stream);
            const auto draws = sample_perturbation(PerturbationSpec(family), n, rng);
            const auto [m, sd] = mean_sd(draws);
            CHECK(std::abs(m) < 4.0 * sd / std::sqrt(static_cast<double>(n)));
        }
    }
    SUBCASE("uniform support and discrete balance") {
        RngStream rng(3);
        const auto u = sample_perturbation(PerturbationSpec(Family::UniformSym, 1.0), n, rng);
        for (double v : u) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
        RngStream rng2(4);
        const auto d = sample_perturbation(PerturbationSpec(Family::TwoPointDiscrete, 1.0), n, rng2);
        std::size_t plus = 0;
        for (double v : d) {
            CHECK((v == 1.0 || v == -1.0));
            plus += v == 1.0;
        }
        CHECK(std::abs(static_cast<double>(plus) / static_cast<double>(n) - 0.5) < 0.002);
    }
}

TEST_CASE("family cdf values, monotonicity, and limits") {
    const PerturbationSpec gumbel(Family::GumbelZeroMean);
    CHECK(family_cdf(gumbel, -kEulerGamma) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(family_cdf(PerturbationSpec(Family::StandardNormal), 0.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(family_cdf(PerturbationSpec(Family::UniformSym, 1.0), 0.0) ==
          doctest::Approx(0.5).epsilon(1e-14));

    for (auto family :
         {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym, Family::TwoPointDiscrete}) {
        const PerturbationSpec spec(family);
        double prev = -1.0;
        for (int k = 0; k < 100; ++k) {
            const double t = -20.0 + 40.0 * k / 99.0;
            const double c = family_cdf(spec, t);
            CHECK(c >= prev);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
        CHECK(family_cdf(spec, -1e10) == doctest::Approx(0.0));
        CHECK(family_cdf(spec, 1e10) == doctest::Approx(1.0));
    }

    // Right-continuous step function for the discrete family.
    const PerturbationSpec disc(Family::TwoPointDiscrete, 1.0);
    CHECK(family_cdf(disc, -1.0 - 1e-12) == 0.0);
    CHECK(family_cdf(disc, -1.0) == 0.5);
    CHECK(family_cdf(disc, 1.0 - 1e-12) == 0.5);
    CHECK(family_cdf(disc, 1.0) == 1.0);
}

TEST_CASE("family pdf values and consistency with the cdf") {
    CHECK(family_pdf(PerturbationSpec(Family::StandardNormal), 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * 3.14159265358979323846)).epsilon(1e-14));
    const PerturbationSpec uni(Family::UniformSym, 1.0);
    CHECK(family_pdf(uni, 0.5) == 0.5);
    CHECK(family_pdf(uni, 1.5) == 0.0);

    // Numeric derivative of the Gumbel cdf matches the (shift-consistent) pdf.
    const PerturbationSpec gumbel(Family::GumbelZeroMean);
    const double h = 1e-5;
    const double numeric = (family_cdf(gumbel, 0.7 + h) - family_cdf(gumbel, 0.7 - h)) / (2.0 * h);
    CHECK(std::abs(numeric - family_pdf(gumbel, 0.7)) < 1e-6);

    CHECK_THROWS_AS(family_pdf(PerturbationSpec(Family::TwoPointDiscrete), 0.5), std::domain_error);
    const PerturbationSpec disc(Family::TwoPointDiscrete, 2.0);
    CHECK(family_pmf(disc, 2.0) == 0.5);
    CHECK(family_pmf(disc, -2.0) == 0.5);
    CHECK(family_pmf(disc, 0.0) == 0.0);
}

TEST_CASE("continuous densities integrate to one (trapezoid, 1e5 points)") {
    auto trapezoid = [](const PerturbationSpec& spec, double lo, double hi, std::size_t n) {
        double sum = 0.0;
        const double h = (hi - lo) / static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = lo + h * static_cast<double>(k);
            const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            sum += w * family_pdf(spec, t);
        }
        return sum * h;
    };
    CHECK(std::abs(trapezoid(PerturbationSpec(Family::GumbelZeroMean), -20.0, 20.0, 100000) - 1.0) <
          1e-6);
    CHECK(std::abs(trapezoid(PerturbationSpec(Family::StandardNormal), -20.0, 20.0, 100000) - 1.0) <
          1e-6);
    // The uniform box is knot-aligned on its own support.
    CHECK(std::abs(trapezoid(PerturbationSpec(Family::UniformSym, 1.0), -1.0, 1.0, 100000) - 1.0) <
          1e-6);
}

TEST_CASE("family quantile inverts the cdf") {
    for (auto family : {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym}) {
        const PerturbationSpec spec(family);
        for (double q : {1e-12, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-12}) {
            const double t = family_quantile(spec, q);
            CHECK(family_cdf(spec, t) == doctest::Approx(q).epsilon(1e-6));
        }
    }
}

TEST_CASE("PerturbationSpec JSON round trip") {
    for (auto family :
         {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym, Family::TwoPointDiscrete}) {
        const PerturbationSpec spec(family, family == Family::UniformSym ? 2.5 : 1.0);
        const nlohmann::json j = spec;
        const auto back = j.get<PerturbationSpec>();
        CHECK(back.family == spec.family);
        CHECK(back.scale == spec.scale);
    }
    const auto parsed = nlohmann::json::parse(R"({"family":"uniform","scale":0.5})")
                            .get<PerturbationSpec>();
    CHECK(parsed.family == Family::UniformSym);
    CHECK(parsed.scale == 0.5);
    CHECK_THROWS(nlohmann::json::parse(R"({"family":"nosuch"})").get<PerturbationSpec>());
}
