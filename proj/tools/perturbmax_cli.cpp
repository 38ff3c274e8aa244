// Command-line front end: estimators, exact oracles, structural probes, and the
// L1 fitting experiment as reproducible, scriptable commands.
//
// Exit codes: 0 success, 2 usage error (unknown flag/subcommand, bad value,
// malformed JSON), 1 numeric failure (quadrature non-convergence, divergent
// fit) with the module error surfaced verbatim.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perturbmax/json_io.hpp"
#include "perturbmax/perturbmax.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_csv_doubles(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "expected comma-separated decimals, got '" + item + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(flag, "expected at least one value");
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("PERTURBMAX_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw CLI::ValidationError("PERTURBMAX_SEED", "not a valid 64-bit seed");
        }
    }
    return 0;
}

void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    f >> j;
    return j;
}

pmax::ParamSpace parse_space(const std::string& s) {
    if (s == "free") return pmax::ParamSpace::Free;
    if (s == "first") return pmax::ParamSpace::FirstAnchored;
    if (s == "zerosum") return pmax::ParamSpace::ZeroSum;
    throw CLI::ValidationError("--space", "expected free|first|zerosum");
}

pmax::TieBreak parse_tie(const std::string& s) {
    if (s == "lowest") return pmax::TieBreak::LowestIndex;
    if (s == "split") return pmax::TieBreak::SplitMass;
    if (s == "random") return pmax::TieBreak::RandomUniform;
    throw CLI::ValidationError("--tie", "expected lowest|split|random");
}

pmax::Family parse_family(const std::string& s) {
    try {
        return pmax::family_from_string(s);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--family", "expected gumbel|normal|uniform|discrete, got '" + s + "'");
    }
}

// Shared estimator/oracle flags.
struct CommonArgs {
    std::string theta_text;
    std::string family = "gumbel";
    double scale = 1.0;
    double temperature = 1.0;
    std::uint64_t samples = 100000;
    std::optional<std::uint64_t> seed;
    std::uint64_t stream = 0;
    std::string tie = "split";
    std::string space = "free";
    std::string output = "json";
    std::string out_path;
    std::string config_path;
    unsigned threads = 0;

    std::vector<double> theta;

    void resolve() {
        if (!config_path.empty()) {
            const json cfg = load_config_file(config_path);
            if (theta_text.empty() && cfg.contains("theta"))
                theta = cfg.at("theta").get<std::vector<double>>();
            if (cfg.contains("spec")) {
                const pmax::PerturbationSpec s = cfg.at("spec").get<pmax::PerturbationSpec>();
                family = pmax::to_string(s.family);
                scale = s.scale;
            }
            if (cfg.contains("samples")) samples = cfg.at("samples").get<std::uint64_t>();
            if (!seed && cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
            if (cfg.contains("temperature")) temperature = cfg.at("temperature").get<double>();
        }
        if (theta.empty() && !theta_text.empty()) theta = parse_csv_doubles(theta_text, "--theta");
        if (!seed) seed = default_seed();
        if (threads > 0) pmax::set_max_threads(threads);
    }

    pmax::PerturbationSpec spec() const { return {parse_family(family), scale}; }
    pmax::McConfig mc() const {
        return {samples, pmax::RngStream(*seed, stream), parse_tie(tie)};
    }
    pmax::Logits logits() const {
        if (theta.empty()) throw CLI::ValidationError("--theta", "is required");
        return pmax::Logits::canonicalized(theta, parse_space(space));
    }

    // The worker cap is deliberately absent: results are identical for any
    // thread count, and the emitted bytes must be too.
    json echo(const std::string& subcommand, const std::string& selector,
              const std::string& selector_value) const {
        json j{{"subcommand", subcommand},
               {"spec", spec()},
               {"samples", samples},
               {"seed", *seed},
               {"stream", stream},
               {"tie", tie},
               {"temperature", temperature},
               {"space", space},
               {"output", output}};
        if (!theta.empty()) j["theta"] = theta;
        if (!selector.empty()) j[selector] = selector_value;
        return j;
    }
};

void add_common_flags(CLI::App* cmd, CommonArgs& a, bool with_sampling = true) {
    cmd->add_option("--theta", a.theta_text, "comma-separated parameter vector");
    cmd->add_option("--family", a.family, "gumbel|normal|uniform|discrete");
    cmd->add_option("--scale", a.scale, "uniform half-width / discrete magnitude");
    cmd->add_option("--temperature", a.temperature, "softmax temperature");
    if (with_sampling) {
        cmd->add_option("--samples", a.samples, "Monte-Carlo sample count");
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&a](std::uint64_t s) { a.seed = s; }, "RNG seed (default: PERTURBMAX_SEED or 0)");
        cmd->add_option("--stream", a.stream, "RNG stream index");
        cmd->add_option("--tie", a.tie, "argmax tie policy: lowest|split|random");
    }
    cmd->add_option("--space", a.space, "parameter space: free|first|zerosum");
    cmd->add_option("--output", a.output, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", a.out_path, "write output to file instead of stdout");
    cmd->add_option("--config", a.config_path, "JSON config with theta/spec/samples/seed");
    cmd->add_option("--threads", a.threads, "worker cap (0 = hardware); results are identical");
}

std::string estimate_csv(const pmax::Estimate& e) {
    std::string out = "index,mean,std_error\n";
    char buf[96];
    for (std::size_t i = 0; i < e.mean.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, e.mean[i], e.std_error[i]);
        out += buf;
    }
    return out;
}

int run_estimate(CommonArgs& a, const std::string& map) {
    a.resolve();
    const pmax::Logits theta = a.logits();
    const pmax::PerturbationSpec spec = a.spec();
    const pmax::McConfig mc = a.mc();

    json payload;
    payload["config"] = a.echo("estimate", "map", map);
    std::optional<pmax::Estimate> est;
    if (map == "softmax") {
        est = pmax::perturb_softmax_mc(theta, spec, a.temperature, mc);
    } else if (map == "argmax") {
        est = pmax::perturb_argmax_mc(theta, spec, mc);
    } else if (map == "logsumexp") {
        est = pmax::expected_logsumexp_mc(theta, spec, mc);
    } else if (map == "max") {
        est = pmax::expected_max_mc(theta, spec, mc);
    } else if (map == "gamma-at-argmax") {
        est = pmax::expected_gamma_at_argmax_mc(theta, spec, mc);
    } else if (map == "jacobian") {
        payload["estimate"] = pmax::pathwise_softmax_jacobian_mc(theta, spec, a.temperature, mc);
    } else if (map == "fenchel-gap") {
        payload["gap"] = pmax::fenchel_gap(theta, spec, mc);
    } else {
        throw CLI::ValidationError("--map",
                                   "expected softmax|argmax|logsumexp|max|gamma-at-argmax|jacobian|fenchel-gap");
    }
    if (est) payload["estimate"] = *est;

    if (a.output == "csv" && est) {
        emit(estimate_csv(*est), a.out_path);
    } else {
        emit(payload.dump(2) + "\n", a.out_path);
    }
    return 0;
}

int run_exact(CommonArgs& a, const std::string& which, double z, double abs_tol, double tail_mass) {
    a.resolve();
    json payload;
    json cfg = a.echo("exact", "which", which);
    cfg["abs_tol"] = abs_tol;
    cfg["tail_mass"] = tail_mass;
    payload["config"] = cfg;

    if (which == "gumbel-argmax") {
        payload["value"] = pmax::exact::gumbel_argmax_exact(a.theta).probs();
    } else if (which == "gumbel-max") {
        payload["value"] = pmax::exact::gumbel_expected_max_exact(a.theta);
    } else if (which == "quadrature") {
        payload["value"] =
            pmax::exact::smooth_argmax_quadrature(a.theta, a.spec(), {abs_tol, tail_mass}).probs();
    } else if (which == "uniform-diff-pdf") {
        payload["value"] = pmax::exact::uniform_diff_pdf(z);
    } else if (which == "uniform2-max") {
        payload["report"] = pmax::exact::uniform2_expected_max(a.theta);
    } else if (which == "uniform2-argmax") {
        payload["report"] = pmax::exact::uniform2_argmax(a.theta);
    } else if (which == "discrete2-max") {
        payload["report"] = pmax::exact::discrete2_expected_max(a.theta);
    } else if (which == "discrete2-subdiff") {
        payload["interval"] = pmax::exact::discrete2_argmax_subdifferential(a.theta);
    } else {
        throw CLI::ValidationError("--which",
                                   "expected gumbel-argmax|gumbel-max|quadrature|uniform-diff-pdf|"
                                   "uniform2-max|uniform2-argmax|discrete2-max|discrete2-subdiff");
    }
    emit(payload.dump(2) + "\n", a.out_path);
    return 0;
}

struct ProbeArgs {
    CommonArgs common;
    std::string which;
    std::string map = "argmax";
    std::string potential = "logsumexp";
    std::string levels_text = "1,3,10";
    std::string direction_text;
    std::size_t index = 0;
    std::size_t dim = 2;
    double c = 13.7;
    double h = 1e-4;
    double p1 = 0.5;
};

int run_probe(ProbeArgs& p) {
    p.common.resolve();
    std::vector<pmax::probes::ProbeResult> results;
    const auto spec = p.common.spec();
    const auto mc = p.common.mc();

    if (p.which == "completeness") {
        const auto levels = parse_csv_doubles(p.levels_text, "--levels");
        const auto map = p.map == "softmax" ? pmax::probes::MapKind::Softmax
                                            : pmax::probes::MapKind::Argmax;
        results.push_back(pmax::probes::completeness_check(spec, map, p.index, levels, p.dim, mc));
    } else if (p.which == "translation") {
        results.push_back(pmax::probes::translation_invariance_check(p.common.logits(), p.c, spec, mc));
    } else if (p.which == "convexity") {
        const auto v = parse_csv_doubles(p.direction_text, "--direction");
        const auto kind = p.potential == "max" ? pmax::probes::PotentialKind::Max
                                               : pmax::probes::PotentialKind::LogSumExp;
        results.push_back(
            pmax::probes::strict_convexity_probe(p.common.logits(), v, kind, spec, mc, p.h));
    } else if (p.which == "softmax-gradient") {
        results.push_back(pmax::probes::softmax_gradient_check(p.common.logits(), spec,
                                                               p.common.temperature, mc, p.h));
    } else if (p.which == "argmax-gradient") {
        results.push_back(pmax::probes::argmax_gradient_check(p.common.logits(), spec, mc, p.h));
    } else if (p.which == "uniform2-noninjectivity") {
        results.push_back(pmax::probes::uniform2_noninjectivity_demo());
    } else if (p.which == "discrete2-multivalue") {
        results.push_back(pmax::probes::discrete2_multivalue_demo(p.p1));
    } else {
        throw CLI::ValidationError("--which",
                                   "expected completeness|translation|convexity|softmax-gradient|"
                                   "argmax-gradient|uniform2-noninjectivity|discrete2-multivalue");
    }

    json cfg = p.common.echo("probe", "which", p.which);
    cfg["map"] = p.map;
    cfg["potential"] = p.potential;
    cfg["levels"] = p.levels_text;
    cfg["index"] = p.index;
    cfg["dim"] = p.dim;
    cfg["c"] = p.c;
    cfg["step"] = p.h;
    cfg["p1"] = p.p1;

    // First line echoes the resolved configuration; one ProbeResult per line after.
    std::string out = json{{"config", cfg}}.dump() + "\n";
    for (const auto& r : results) out += json(r).dump() + "\n";
    emit(out, p.common.out_path);
    return 0;
}

struct FitArgs {
    std::string target = "explicit";
    int trials = 12;
    double prob = 0.3;
    double lambda = 50.0;
    double r = 50.0;
    int dim = 100;
    std::string weights_text = "10,3,4,5,10,10,3,4,5,10";
    std::string family = "normal";
    double scale = 1.0;
    double temperature = 1.0;
    double lr = 1e-2;
    int iters = 300;
    int batch = 256;
    std::optional<std::uint64_t> seed;
    std::string space = "free";
    std::string objective = "exact";
    int target_samples = 1000;
    std::uint64_t eval_samples = 65536;
    std::string init = "uniform";
    double noise = 0.1;
    std::string trace_path;
    std::string out_path;
    std::string config_path;
    unsigned threads = 0;

    pmax::fitting::TargetDistribution target_dist() const {
        if (target == "binomial") return pmax::fitting::Binomial{trials, prob};
        if (target == "poisson") return pmax::fitting::Poisson{lambda, dim};
        if (target == "negative-binomial") return pmax::fitting::NegBinomial{r, prob, dim};
        if (target == "explicit")
            return pmax::fitting::Explicit{parse_csv_doubles(weights_text, "--weights")};
        throw CLI::ValidationError("--target", "expected binomial|poisson|negative-binomial|explicit");
    }

    pmax::fitting::FitConfig config() const {
        pmax::fitting::FitConfig cfg;
        if (!config_path.empty()) {
            const json j = load_config_file(config_path);
            if (j.contains("target")) cfg.target = j.at("target").get<pmax::fitting::TargetDistribution>();
            if (j.contains("spec")) cfg.spec = j.at("spec").get<pmax::PerturbationSpec>();
            if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
            if (j.contains("iters")) cfg.iters = j.at("iters").get<int>();
            if (j.contains("batch")) cfg.batch = j.at("batch").get<int>();
            if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("temperature")) cfg.temperature = j.at("temperature").get<double>();
            return cfg;
        }
        cfg.target = target_dist();
        cfg.spec = pmax::PerturbationSpec(parse_family(family), scale);
        cfg.temperature = temperature;
        cfg.lr = lr;
        cfg.iters = iters;
        cfg.batch = batch;
        cfg.seed = seed ? *seed : default_seed();
        cfg.space = parse_space(space);
        if (objective == "exact")
            cfg.objective = pmax::fitting::ObjectiveMode::ExactPmf;
        else if (objective == "histogram")
            cfg.objective = pmax::fitting::ObjectiveMode::EmpiricalHistogram;
        else
            throw CLI::ValidationError("--objective", "expected exact|histogram");
        cfg.target_samples = target_samples;
        cfg.eval_samples = eval_samples;
        if (init == "uniform")
            cfg.init = {pmax::fitting::InitKind::UniformConstant, noise};
        else if (init == "seeded")
            cfg.init = {pmax::fitting::InitKind::Seeded, noise};
        else
            throw CLI::ValidationError("--init", "expected uniform|seeded");
        return cfg;
    }
};

int run_fit(FitArgs& a) {
    if (a.threads > 0) pmax::set_max_threads(a.threads);
    const pmax::fitting::FitConfig cfg = a.config();
    const pmax::fitting::FitTrace trace = pmax::fitting::fit(cfg);

    if (!a.trace_path.empty()) emit(pmax::fitting::trace_csv(trace), a.trace_path);

    json payload;
    payload["config"] = cfg;
    payload["theta"] = trace.theta_final.values();
    payload["model"] = trace.model_final.probs();
    payload["final_l1"] = trace.final_l1;
    payload["losses"] = trace.losses;
    const auto pmf = pmax::fitting::target_pmf(cfg.target);
    payload["target_captured_mass"] = pmf.captured_mass;
    if (pmf.low_mass_warning) payload["warning"] = "truncation captured less than 99% of target mass";
    emit(payload.dump(2) + "\n", a.out_path);
    return 0;
}

struct TableArgs {
    std::string targets_text = "binomial,poisson,negative-binomial,explicit";
    std::string families_text = "gumbel,normal";
    int repeats = 5;
    FitArgs fit;
};

int run_table(TableArgs& a) {
    if (a.fit.threads > 0) pmax::set_max_threads(a.fit.threads);
    std::vector<pmax::fitting::TargetDistribution> targets;
    {
        std::stringstream ss(a.targets_text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            FitArgs one = a.fit;
            one.target = item;
            targets.push_back(one.target_dist());
        }
    }
    std::vector<pmax::PerturbationSpec> specs;
    {
        std::stringstream ss(a.families_text);
        std::string item;
        while (std::getline(ss, item, ','))
            specs.emplace_back(parse_family(item), a.fit.scale);
    }
    FitArgs base = a.fit;
    base.target = "explicit";  // placeholder; compare_families overrides per row
    const auto rows = pmax::fitting::compare_families(targets, specs, a.repeats, base.config());
    emit(pmax::fitting::comparison_csv(rows), a.fit.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perturb-Softmax / Perturb-Argmax probability models: Monte-Carlo estimators, "
                 "exact oracles, structural probes, and L1 distribution fitting"};
    app.require_subcommand(1);

    CommonArgs est_args;
    std::string est_map = "softmax";
    CLI::App* est = app.add_subcommand("estimate", "Monte-Carlo estimators");
    est->add_option("--map", est_map,
                    "softmax|argmax|logsumexp|max|gamma-at-argmax|jacobian|fenchel-gap");
    add_common_flags(est, est_args);

    CommonArgs ex_args;
    std::string ex_which = "gumbel-argmax";
    double ex_z = 0.0, ex_abs_tol = 1e-8, ex_tail = 1e-12;
    CLI::App* ex = app.add_subcommand("exact", "closed-form and quadrature oracles");
    ex->add_option("--which", ex_which, "oracle selector");
    ex->add_option("--z", ex_z, "evaluation point for uniform-diff-pdf");
    ex->add_option("--abs-tol", ex_abs_tol, "quadrature absolute tolerance");
    ex->add_option("--tail-mass", ex_tail, "quadrature truncation tail mass");
    add_common_flags(ex, ex_args);

    ProbeArgs pr_args;
    CLI::App* pr = app.add_subcommand("probe", "structural probes (newline-delimited JSON results)");
    pr->add_option("--which", pr_args.which, "probe selector")->required();
    pr->add_option("--map", pr_args.map, "completeness map: softmax|argmax");
    pr->add_option("--potential", pr_args.potential, "convexity potential: logsumexp|max");
    pr->add_option("--levels", pr_args.levels_text, "completeness levels, comma separated");
    pr->add_option("--direction", pr_args.direction_text, "convexity direction vector");
    pr->add_option("--index", pr_args.index, "completeness target index");
    pr->add_option("--dim", pr_args.dim, "completeness dimension");
    pr->add_option("--c", pr_args.c, "translation shift");
    pr->add_option("--step", pr_args.h, "finite-difference step");
    pr->add_option("--p1", pr_args.p1, "candidate first coordinate for discrete2-multivalue");
    add_common_flags(pr, pr_args.common);

    FitArgs fit_args;
    CLI::App* ft = app.add_subcommand("fit", "fit Perturb-Softmax parameters to a target pmf");
    ft->add_option("--target", fit_args.target, "binomial|poisson|negative-binomial|explicit");
    ft->add_option("--trials", fit_args.trials, "binomial trials");
    ft->add_option("--prob", fit_args.prob, "binomial / negative-binomial success probability");
    ft->add_option("--lambda", fit_args.lambda, "poisson rate");
    ft->add_option("--r", fit_args.r, "negative-binomial successes");
    ft->add_option("--dim", fit_args.dim, "truncation dimension for infinite-support targets");
    ft->add_option("--weights", fit_args.weights_text, "explicit weights, comma separated");
    ft->add_option("--family", fit_args.family, "perturbation family");
    ft->add_option("--scale", fit_args.scale, "perturbation scale");
    ft->add_option("--temperature", fit_args.temperature, "softmax temperature");
    ft->add_option("--lr", fit_args.lr, "Adam learning rate");
    ft->add_option("--iters", fit_args.iters, "optimization steps");
    ft->add_option("--batch", fit_args.batch, "perturbation samples per step");
    ft->add_option_function<std::uint64_t>(
        "--seed", [&fit_args](std::uint64_t s) { fit_args.seed = s; }, "RNG seed");
    ft->add_option("--space", fit_args.space, "parameter space: free|first|zerosum");
    ft->add_option("--objective", fit_args.objective, "exact|histogram");
    ft->add_option("--target-samples", fit_args.target_samples, "histogram sample count");
    ft->add_option("--eval-samples", fit_args.eval_samples, "final model evaluation samples");
    ft->add_option("--init", fit_args.init, "uniform|seeded");
    ft->add_option("--noise", fit_args.noise, "seeded init noise scale");
    ft->add_option("--trace", fit_args.trace_path, "write per-step loss CSV here");
    ft->add_option("--out", fit_args.out_path, "write final JSON here instead of stdout");
    ft->add_option("--config", fit_args.config_path, "JSON fit config");
    ft->add_option("--threads", fit_args.threads, "worker cap (0 = hardware)");

    TableArgs tab_args;
    CLI::App* tab = app.add_subcommand("table", "family-comparison table over targets (CSV)");
    tab->add_option("--targets", tab_args.targets_text, "comma-separated target kinds");
    tab->add_option("--families", tab_args.families_text, "comma-separated families");
    tab->add_option("--repeats", tab_args.repeats, "fits per cell");
    tab->add_option("--trials", tab_args.fit.trials, "binomial trials");
    tab->add_option("--prob", tab_args.fit.prob, "success probability");
    tab->add_option("--lambda", tab_args.fit.lambda, "poisson rate");
    tab->add_option("--r", tab_args.fit.r, "negative-binomial successes");
    tab->add_option("--dim", tab_args.fit.dim, "truncation dimension");
    tab->add_option("--weights", tab_args.fit.weights_text, "explicit weights");
    tab->add_option("--lr", tab_args.fit.lr, "Adam learning rate");
    tab->add_option("--iters", tab_args.fit.iters, "optimization steps");
    tab->add_option("--batch", tab_args.fit.batch, "samples per step");
    tab->add_option_function<std::uint64_t>(
        "--seed", [&tab_args](std::uint64_t s) { tab_args.fit.seed = s; }, "base RNG seed");
    tab->add_option("--temperature", tab_args.fit.temperature, "softmax temperature");
    tab->add_option("--eval-samples", tab_args.fit.eval_samples, "final evaluation samples");
    tab->add_option("--out", tab_args.fit.out_path, "write CSV here instead of stdout");
    tab->add_option("--threads", tab_args.fit.threads, "worker cap (0 = hardware)");

    try {
        app.parse(argc, argv);
        if (est->parsed()) return run_estimate(est_args, est_map);
        if (ex->parsed()) return run_exact(ex_args, ex_which, ex_z, ex_abs_tol, ex_tail);
        if (pr->parsed()) return run_probe(pr_args);
        if (ft->parsed()) return run_fit(fit_args);
        if (tab->parsed()) return run_table(tab_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
