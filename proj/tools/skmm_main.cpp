#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skmm/bench.hpp"
#include "skmm/evaluator.hpp"
#include "skmm/io.hpp"
#include "skmm/kernels.hpp"
#include "skmm/matrix.hpp"
#include "skmm/moments.hpp"
#include "skmm/selectors.hpp"
#include "skmm/sketch.hpp"
#include "skmm/synth.hpp"

namespace {

using skmm::ordered_json;

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("alpha grid must be nonempty");
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0;
        long count = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%ld", &lo, &hi, &count) != 3 || count < 1)
            throw std::invalid_argument("grid spec must be lo:hi:count");
        if (count == 1) {
            grid.push_back(lo);
        } else {
            for (long i = 0; i < count; ++i)
                grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                        static_cast<double>(count - 1));
        }
        return grid;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string field = text.substr(pos, comma - pos);
        if (field.empty()) throw std::invalid_argument("empty alpha grid entry");
        grid.push_back(std::stod(field));
        pos = comma + 1;
    }
    return grid;
}

struct SelectArgs {
    std::string method;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string in_path;
    std::string out_path;
    std::size_t m = 32;
    std::string sketch_kind = "gaussian";
    std::size_t sparsity = 8;
    double c_s = 0.999;
    std::size_t iters = 10000;
    double lr = 1e-7;
    std::string optimizer = "adam";
    std::string sampling = "weighted";
    bool no_keep_best = false;
    bool drop_null = false;
    std::size_t lev_k = 32;
    double lev_rho = 1e3;
};

skmm::MethodConfig method_config_from(const SelectArgs& a) {
    skmm::MethodConfig m;
    m.name = a.method;
    m.sketch_dim = a.m;
    if (a.sketch_kind == "gaussian") m.sketch_kind = skmm::SketchKind::gaussian;
    else if (a.sketch_kind == "sparse_sign") m.sketch_kind = skmm::SketchKind::sparse_sign;
    else throw std::invalid_argument("unknown sketch kind " + a.sketch_kind);
    m.sketch_sparsity = a.sparsity;
    m.skmm.c_s = a.c_s;
    m.skmm.iterations = a.iters;
    m.skmm.learning_rate = a.lr;
    if (a.optimizer == "adam") m.skmm.optimizer = skmm::SkmmOptimizer::adam;
    else if (a.optimizer == "pgd") m.skmm.optimizer = skmm::SkmmOptimizer::pgd;
    else throw std::invalid_argument("unknown optimizer " + a.optimizer);
    if (a.sampling == "weighted") m.skmm.sampling = skmm::SamplingMode::weighted;
    else if (a.sampling == "top_n") m.skmm.sampling = skmm::SamplingMode::top_n;
    else throw std::invalid_argument("unknown sampling mode " + a.sampling);
    m.skmm.keep_best = !a.no_keep_best;
    m.skmm.drop_null_directions = a.drop_null;
    m.leverage_k = a.lev_k;
    m.leverage_rho = a.lev_rho;
    return m;
}

ordered_json resolved_select_config(const SelectArgs& a) {
    ordered_json cfg;
    cfg["input"] = a.in_path;
    if (a.method == "skmm") {
        cfg["m"] = a.m;
        cfg["sketch"] = a.sketch_kind;
        if (a.sketch_kind == "sparse_sign") cfg["sparsity"] = a.sparsity;
        cfg["c_s"] = a.c_s;
        cfg["iters"] = a.iters;
        cfg["lr"] = a.lr;
        cfg["optimizer"] = a.optimizer;
        cfg["sampling"] = a.sampling;
        cfg["keep_best"] = !a.no_keep_best;
        cfg["drop_null"] = a.drop_null;
    } else if (a.method == "t_leverage") {
        cfg["k"] = a.lev_k;
    } else if (a.method == "r_leverage") {
        cfg["rho"] = a.lev_rho;
    }
    return cfg;
}

int run_synth(const skmm::GmmSpec& spec, const std::string& out_prefix) {
    skmm::GeneratedDataset data = skmm::generate_gmm(spec);
    skmm::write_matrix(out_prefix + ".features.skmm", data.features);
    skmm::write_vector(out_prefix + ".labels.skmm", data.labels);

    std::vector<std::size_t> sizes(spec.clusters, 0);
    for (std::size_t c : data.cluster_assignment) ++sizes[c];
    ordered_json meta;
    meta["n"] = spec.n_samples;
    meta["r"] = spec.ambient_dim;
    meta["clusters"] = spec.clusters;
    meta["sigma_max"] = spec.sigma_max;
    meta["seed"] = spec.seed;
    meta["partition"] = "multinomial-nonempty";
    meta["cluster_sizes"] = sizes;
    meta["stds"] = data.stds;
    skmm::write_text_file(out_prefix + ".meta.json", meta.dump(2) + "\n");
    std::cout << "wrote " << out_prefix << ".features.skmm, .labels.skmm, .meta.json\n";
    return 0;
}

int run_select(const SelectArgs& args) {
    const skmm::DenseMatrix x = skmm::read_matrix(args.in_path);
    const skmm::MethodConfig method = method_config_from(args);
    skmm::Selection sel = skmm::run_selector(method, x, nullptr, nullptr, args.n, args.seed);
    ordered_json j = skmm::selection_json(sel);
    ordered_json cfg = resolved_select_config(args);
    for (auto& [key, value] : cfg.items()) j["config"][key] = value;
    const std::string text = j.dump(2) + "\n";
    if (args.out_path.empty()) std::cout << text;
    else skmm::write_text_file(args.out_path, text);
    return 0;
}

struct EvalArgs {
    std::string selection_path;
    std::string data_path;
    std::string labels_path;
    std::string grid_spec = "1e-2:1e2:100";
    std::size_t folds = 2;
    std::string out_path;
    bool diagnostics = false;
    std::size_t m = 32;
    std::string sketch_kind = "gaussian";
    std::size_t sparsity = 8;
    std::optional<std::uint64_t> sketch_seed;
    std::size_t diag_k = 0;  // 0 -> m
    double c_s_probe = 0.999;
};

int run_eval(const EvalArgs& args) {
    const skmm::Selection sel =
        skmm::selection_from_json(ordered_json::parse(skmm::read_text_file(args.selection_path)));
    const skmm::DenseMatrix x = skmm::read_matrix(args.data_path);
    const std::vector<double> y = skmm::read_vector(args.labels_path);
    const std::vector<double> grid = parse_grid(args.grid_spec);

    skmm::EvalReport report =
        skmm::evaluate_selection(x, y, sel.indices, grid, args.folds, sel.seed);

    if (args.diagnostics) {
        const std::uint64_t sseed = args.sketch_seed.value_or(sel.seed);
        skmm::SketchOperator op =
            args.sketch_kind == "gaussian"
                ? skmm::build_gaussian_sketch(x.cols(), args.m, sseed)
                : skmm::build_sparse_sign_sketch(x.cols(), args.m, args.sparsity, sseed);
        skmm::DenseMatrix sketched = skmm::apply_sketch(x, op);
        const std::size_t k = args.diag_k == 0 ? args.m : args.diag_k;
        report.diagnostics = skmm::tradeoff_diagnostics(sketched, sel.indices, k, args.c_s_probe);
        const auto& kn = skmm::kernels::active();
        double tr = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) tr += kn.sumsq(x.row(i), x.cols());
        report.trace_sigma = tr / static_cast<double>(x.rows());
    }

    ordered_json j;
    j["method"] = sel.method;
    j["n"] = sel.indices.size();
    j["seed"] = sel.seed;
    ordered_json body = skmm::eval_report_json(report);
    for (auto& [key, value] : body.items()) j[key] = value;
    j["config"] = ordered_json{{"selection", args.selection_path},
                               {"data", args.data_path},
                               {"labels", args.labels_path},
                               {"grid", args.grid_spec},
                               {"folds", args.folds}};
    const std::string text = j.dump(2) + "\n";
    if (args.out_path.empty()) std::cout << text;
    else skmm::write_text_file(args.out_path, text);
    return 0;
}

int run_bench_cmd(const std::string& plan_path, std::size_t jobs, const std::string& out_override,
                  std::size_t folds_override) {
    skmm::BenchPlan plan = skmm::parse_bench_plan(skmm::read_text_file(plan_path));
    if (!out_override.empty()) plan.output_path = out_override;
    if (folds_override != 0) plan.folds = folds_override;
    if (plan.output_path.empty()) plan.output_path = "bench.csv";

    const skmm::DenseMatrix x = skmm::read_matrix(plan.dataset_path);
    const std::vector<double> y = skmm::read_vector(plan.labels_path);
    const std::vector<skmm::BenchCell> cells = skmm::run_bench(plan, x, y, jobs);
    const std::string csv = skmm::bench_csv(cells);
    skmm::write_text_file(plan.output_path, csv);
    std::cout << csv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coreset selection toolkit"};
    app.require_subcommand(1);

    skmm::GmmSpec gmm;
    std::string synth_out = "gmm";
    CLI::App* synth = app.add_subcommand("synth", "generate the GMM benchmark dataset");
    synth->add_option("--n", gmm.n_samples, "sample count");
    synth->add_option("--r", gmm.ambient_dim, "ambient dimension");
    synth->add_option("--clusters", gmm.clusters, "cluster count");
    synth->add_option("--sigma-max", gmm.sigma_max, "max cluster std");
    synth->add_option("--seed", gmm.seed, "generator seed");
    synth->add_option("--out", synth_out, "output path prefix");

    SelectArgs sa;
    CLI::App* select = app.add_subcommand("select", "select a coreset from a feature matrix");
    select->add_option("--method", sa.method, "selector name")->required();
    select->add_option("--n", sa.n, "coreset size")->required();
    select->add_option("--seed", sa.seed, "selector seed");
    select->add_option("--in", sa.in_path, "feature matrix path")->required();
    select->add_option("--out", sa.out_path, "selection JSON path (default stdout)");
    select->add_option("--m", sa.m, "sketch dimension");
    select->add_option("--sketch", sa.sketch_kind, "sketch kind: gaussian|sparse_sign");
    select->add_option("--sparsity", sa.sparsity, "nonzeros per row for sparse_sign");
    select->add_option("--c-s", sa.c_s, "moment matching strength");
    select->add_option("--iters", sa.iters, "optimizer iterations");
    select->add_option("--lr", sa.lr, "learning rate");
    select->add_option("--optimizer", sa.optimizer, "adam|pgd");
    select->add_option("--sampling", sa.sampling, "weighted|top_n");
    select->add_flag("--no-keep-best", sa.no_keep_best, "use the last iterate, not the best");
    select->add_flag("--drop-null", sa.drop_null, "ignore null sketched directions");
    select->add_option("--k", sa.lev_k, "rank for truncated leverage");
    select->add_option("--rho", sa.lev_rho, "ridge for ridge leverage");

    EvalArgs ea;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a selection with cross-validated ridge");
    eval->add_option("--selection", ea.selection_path, "selection JSON path")->required();
    eval->add_option("--data", ea.data_path, "feature matrix path")->required();
    eval->add_option("--labels", ea.labels_path, "label vector path")->required();
    eval->add_option("--grid", ea.grid_spec, "alpha grid: lo:hi:count or comma list");
    eval->add_option("--folds", ea.folds, "cross-validation folds");
    eval->add_option("--out", ea.out_path, "report JSON path (default stdout)");
    eval->add_flag("--diagnostics", ea.diagnostics, "attach moment-matching diagnostics");
    eval->add_option("--m", ea.m, "sketch dimension for diagnostics");
    eval->add_option("--sketch", ea.sketch_kind, "sketch kind for diagnostics");
    eval->add_option("--sparsity", ea.sparsity, "sparse_sign nonzeros per row");
    eval->add_option("--sketch-seed", ea.sketch_seed, "sketch seed (default: selection seed)");
    eval->add_option("--diag-k", ea.diag_k, "rank probed by diagnostics (default m)");
    eval->add_option("--c-s-probe", ea.c_s_probe, "c_S used by the moment condition check");

    std::string plan_path, bench_out;
    std::size_t jobs = 1, folds_override = 0;
    CLI::App* bench = app.add_subcommand("bench", "run a benchmark plan");
    bench->add_option("--plan", plan_path, "plan JSON path")->required();
    bench->add_option("--jobs", jobs, "concurrent cells");
    bench->add_option("--out", bench_out, "override plan output path");
    bench->add_option("--folds", folds_override, "override evaluator folds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (synth->parsed()) return run_synth(gmm, synth_out);
        if (select->parsed()) return run_select(sa);
        if (eval->parsed()) return run_eval(ea);
        if (bench->parsed()) return run_bench_cmd(plan_path, jobs, bench_out, folds_override);
    } catch (const skmm::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
