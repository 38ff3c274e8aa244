#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "perturbmax/exact.hpp"
#include "perturbmax/probes.hpp"

using namespace pmax;
using namespace pmax::probes;

TEST_CASE("completeness series climbs toward the vertex") {
    SUBCASE("bounded families saturate exactly once the gap clears the support") {
        for (auto family : {Family::UniformSym, Family::TwoPointDiscrete}) {
            const auto series = completeness_probe(PerturbationSpec(family), MapKind::Argmax, 0,
                                                   {3.0}, 2, McConfig(100000, RngStream(1)));
            CHECK(series.size() == 1);
            CHECK(series[0].second.mean[0] == 1.0);
            CHECK(series[0].second.std_error[0] == 0.0);
        }
    }
    SUBCASE("gumbel softmax reaches 0.99 by level 10") {
        const auto series =
            completeness_probe(PerturbationSpec(Family::GumbelZeroMean), MapKind::Softmax, 0,
                               {10.0}, 2, McConfig(200000, RngStream(2)));
        CHECK(series[0].second.mean[0] >= 0.99);
    }
    SUBCASE("series is monotone within noise for every family and both maps") {
        for (auto family : {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym,
                            Family::TwoPointDiscrete}) {
            for (auto map : {MapKind::Softmax, MapKind::Argmax}) {
                for (std::size_t d : {2u, 5u}) {
                    const auto r = completeness_check(PerturbationSpec(family), map, 0,
                                                      {1.0, 3.0, 10.0}, d,
                                                      McConfig(100000, RngStream(3)));
                    CHECK(r.passed);
                    CHECK(r.observed.size() == 3);
                }
            }
        }
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(completeness_probe(PerturbationSpec(Family::GumbelZeroMean), MapKind::Argmax,
                                           5, {1.0}, 2, McConfig(10, RngStream(4))),
                        std::invalid_argument);
        CHECK_THROWS_AS(completeness_probe(PerturbationSpec(Family::GumbelZeroMean), MapKind::Argmax,
                                           0, {3.0, 1.0}, 2, McConfig(10, RngStream(4))),
                        std::invalid_argument);
    }
}

TEST_CASE("translation invariance holds for constant shifts only") {
    // Coarse dyadic coordinates keep theta + c exactly representable, so the
    // anchored parameters are bit-identical.
    const Logits theta({0.25, -1.5, 2.0});
    for (auto family : {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym,
                        Family::TwoPointDiscrete}) {
        const McConfig mc(50000, RngStream(11));
        const auto r = translation_invariance_check(theta, 13.7, PerturbationSpec(family), mc);
        CHECK(r.passed);
        CHECK(r.observed[0] == 0.0);
        CHECK(r.observed[1] == 0.0);
        const auto r0 = translation_invariance_check(theta, 0.0, PerturbationSpec(family), mc);
        CHECK(r0.passed);
    }

    // A non-constant shift moves the distribution by far more than noise.
    const McConfig mc(1000000, RngStream(12));
    const Logits a({0.0, 0.0});
    const Logits b({1.0, 0.0});
    const auto pa = perturb_softmax_mc(a, PerturbationSpec(Family::GumbelZeroMean), 1.0, mc);
    const auto pb = perturb_softmax_mc(b, PerturbationSpec(Family::GumbelZeroMean), 1.0, mc);
    CHECK(std::abs(pa.mean[0] - pb.mean[0]) > 5.0 * (pa.std_error[0] + pb.std_error[0]));
}

TEST_CASE("probe results reproduce bit-for-bit from their seed") {
    const Logits theta({0.25, -1.5, 2.0});
    const McConfig mc(20000, RngStream(13));
    const auto r1 = translation_invariance_check(theta, 7.0, PerturbationSpec(Family::StandardNormal), mc);
    const auto r2 = translation_invariance_check(theta, 7.0, PerturbationSpec(Family::StandardNormal), mc);
    CHECK(r1.passed == r2.passed);
    CHECK(r1.observed == r2.observed);
    CHECK(r1.seed == r2.seed);
}

TEST_CASE("strict convexity probe") {
    SUBCASE("affine direction: second difference vanishes for every family and potential") {
        for (auto family : {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym,
                            Family::TwoPointDiscrete}) {
            for (auto potential : {PotentialKind::LogSumExp, PotentialKind::Max}) {
                const auto r = strict_convexity_probe(Logits({0.5, -0.25, 1.0}),
                                                      {1.0, 1.0, 1.0}, potential,
                                                      PerturbationSpec(family),
                                                      McConfig(100000, RngStream(21)), 0.5);
                CHECK(r.passed);
                CHECK(std::abs(r.observed[0]) <= 1e-9);
            }
        }
    }
    SUBCASE("non-affine direction: positive curvature detected") {
        const auto r = strict_convexity_probe(Logits({0.0, 0.0}), {1.0, -1.0},
                                              PotentialKind::LogSumExp,
                                              PerturbationSpec(Family::GumbelZeroMean),
                                              McConfig(1000000, RngStream(22)), 0.5);
        CHECK(r.passed);
        CHECK(r.observed[0] > 0.0);
    }
    SUBCASE("discrete max is locally linear away from the overlap lines") {
        const auto r = strict_convexity_probe(Logits({5.0, 0.0}), {1.0, -1.0}, PotentialKind::Max,
                                              PerturbationSpec(Family::TwoPointDiscrete),
                                              McConfig(100000, RngStream(23)), 0.1);
        CHECK(std::abs(r.observed[0]) <= 1e-9);
    }
    SUBCASE("step validation") {
        CHECK_THROWS_AS(strict_convexity_probe(Logits({0.0, 0.0}), {1.0, -1.0},
                                               PotentialKind::LogSumExp,
                                               PerturbationSpec(Family::GumbelZeroMean),
                                               McConfig(10, RngStream(24)), 1e-8),
                        std::invalid_argument);
    }
}

TEST_CASE("softmax gradient identity for all four families") {
    for (auto family : {Family::GumbelZeroMean, Family::StandardNormal, Family::UniformSym,
                        Family::TwoPointDiscrete}) {
        const auto r = softmax_gradient_check(Logits({1.0, 0.0}), PerturbationSpec(family), 1.0,
                                              McConfig(10000, RngStream(31)), 1e-4);
        CHECK(r.passed);
        CHECK(r.observed[0] <= 1e-7);
    }
    const auto r3 = softmax_gradient_check(Logits({0.0, 0.0, 0.0}),
                                           PerturbationSpec(Family::StandardNormal), 1.0,
                                           McConfig(10000, RngStream(32)), 1e-4);
    CHECK(r3.passed);

    // Tempered potential: gradient of tau * E[logsumexp((theta + gamma)/tau)].
    const auto rt = softmax_gradient_check(Logits({1.0, 0.0}), PerturbationSpec(Family::GumbelZeroMean),
                                           0.5, McConfig(10000, RngStream(33)), 1e-4);
    CHECK(rt.passed);

    CHECK_THROWS_AS(softmax_gradient_check(Logits({1.0, 0.0}), PerturbationSpec(Family::GumbelZeroMean),
                                           1.0, McConfig(10, RngStream(34)), 0.5),
                    std::invalid_argument);
}

TEST_CASE("argmax gradient identity for continuous families") {
    SUBCASE("uniform, away from kinks, against the closed form") {
        const auto r = argmax_gradient_check(Logits({1.0, 0.0}), PerturbationSpec(Family::UniformSym, 1.0),
                                             McConfig(1000000, RngStream(41)), 1e-4);
        CHECK(r.passed);
        CHECK(r.observed[0] <= 1e-3);

        const auto est = perturb_argmax_mc(Logits({1.0, 0.0}), PerturbationSpec(Family::UniformSym, 1.0),
                                           McConfig(1000000, RngStream(42)));
        const auto closed = exact::uniform2_argmax(std::vector<double>{1.0, 0.0});
        CHECK(std::abs(est.mean[0] - closed.value[0]) < 5.0 * est.std_error[0]);
    }
    SUBCASE("gumbel matches the softmax identity") {
        const auto r = argmax_gradient_check(Logits({1.0, 0.0}), PerturbationSpec(Family::GumbelZeroMean),
                                             McConfig(200000, RngStream(43)), 1e-4);
        CHECK(r.passed);
    }
    SUBCASE("normal matches the quadrature oracle") {
        const Logits theta({0.3, -0.3, 1.1});
        const auto r = argmax_gradient_check(theta, PerturbationSpec(Family::StandardNormal),
                                             McConfig(200000, RngStream(44)), 1e-4);
        CHECK(r.passed);
        const auto est = perturb_argmax_mc(theta, PerturbationSpec(Family::StandardNormal),
                                           McConfig(1000000, RngStream(45)));
        const auto q = exact::smooth_argmax_quadrature(theta.values(),
                                                       PerturbationSpec(Family::StandardNormal));
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(est.mean[i] - q[i]) < std::max(5.0 * est.std_error[i], 1e-5));
    }
    SUBCASE("discrete perturbations are refused") {
        CHECK_THROWS_AS(argmax_gradient_check(Logits({1.0, 0.0}), PerturbationSpec(Family::TwoPointDiscrete),
                                              McConfig(100, RngStream(46)), 1e-4),
                        std::domain_error);
    }
    SUBCASE("kink proximity is rejected for the uniform family") {
        CHECK_THROWS_AS(argmax_gradient_check(Logits({2.00005, 0.0}), PerturbationSpec(Family::UniformSym, 1.0),
                                              McConfig(100, RngStream(47)), 1e-3),
                        std::invalid_argument);
    }
}

TEST_CASE("uniform2 non-injectivity demo") {
    const auto r = uniform2_noninjectivity_demo();
    CHECK(r.passed);
    CHECK(r.observed == std::vector<double>{1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("discrete2 multivalue demo decides membership exactly") {
    for (double p1 : {0.5, 0.25, 0.75}) {
        const auto r = discrete2_multivalue_demo(p1);
        CHECK(r.passed);
        CHECK(r.observed[0] >= 0.0);  // member
    }
    for (double p1 : {0.9, 0.1, 0.0, 1.0}) {
        const auto r = discrete2_multivalue_demo(p1);
        CHECK(r.passed);
        CHECK(r.observed[0] < 0.0);  // not a member
    }
    CHECK_THROWS_AS(discrete2_multivalue_demo(1.2), std::domain_error);
}
