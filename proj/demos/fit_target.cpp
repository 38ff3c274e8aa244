// Fits a Perturb-Softmax model to a binomial target with Gumbel and with
// Normal perturbations and prints the final L1 of each.

#include <cstdio>

#include "perturbmax/perturbmax.hpp"

int main() {
    using namespace pmax;

    for (auto family : {Family::GumbelZeroMean, Family::StandardNormal}) {
        fitting::FitConfig cfg;
        cfg.target = fitting::Binomial{12, 0.3};
        cfg.spec = PerturbationSpec(family);
        cfg.seed = 0;
        const auto trace = fitting::fit(cfg);
        std::printf("%-8s start L1 = %.3f  final L1 = %.4f\n", to_string(family),
                    trace.losses.front(), trace.final_l1);
    }
    return 0;
}
