#include "skmm/bench.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "skmm/evaluator.hpp"

namespace skmm {
namespace {

using njson = nlohmann::ordered_json;

const std::map<std::string, std::vector<std::string>>& method_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"uniform", {}},
        {"herding", {}},
        {"kcenter", {}},
        {"adaptive", {}},
        {"leverage", {}},
        {"t_leverage", {"k"}},
        {"r_leverage", {"rho"}},
        {"skmm",
         {"m", "sketch", "sparsity", "c_s", "iters", "lr", "optimizer", "sampling",
          "keep_best", "drop_null"}},
    };
    return keys;
}

LeverageVariant variant_for(const std::string& name) {
    if (name == "t_leverage") return LeverageVariant::truncated;
    if (name == "r_leverage") return LeverageVariant::ridge;
    return LeverageVariant::plain;
}

bool is_leverage(const std::string& name) {
    return name == "leverage" || name == "t_leverage" || name == "r_leverage";
}

bool is_seeded(const std::string& name) { return name != "herding"; }

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

MethodConfig parse_method(const njson& j) {
    MethodConfig m;
    if (!j.is_object() || !j.contains("name"))
        throw std::invalid_argument("plan: each method needs a name");
    m.name = j["name"].get<std::string>();
    const auto& keys = method_keys();
    auto it = keys.find(m.name);
    if (it == keys.end()) throw std::invalid_argument("plan: unknown method " + m.name);
    for (const auto& [key, value] : j.items()) {
        if (key == "name") continue;
        bool allowed = false;
        for (const auto& k : it->second) allowed = allowed || k == key;
        if (!allowed)
            throw std::invalid_argument("plan: method " + m.name + " does not take key " + key);
        if (key == "m") m.sketch_dim = value.get<std::size_t>();
        else if (key == "sketch") {
            const std::string kind = value.get<std::string>();
            if (kind == "gaussian") m.sketch_kind = SketchKind::gaussian;
            else if (kind == "sparse_sign") m.sketch_kind = SketchKind::sparse_sign;
            else throw std::invalid_argument("plan: unknown sketch kind " + kind);
        } else if (key == "sparsity") m.sketch_sparsity = value.get<std::size_t>();
        else if (key == "c_s") m.skmm.c_s = value.get<double>();
        else if (key == "iters") m.skmm.iterations = value.get<std::size_t>();
        else if (key == "lr") m.skmm.learning_rate = value.get<double>();
        else if (key == "optimizer") {
            const std::string opt = value.get<std::string>();
            if (opt == "adam") m.skmm.optimizer = SkmmOptimizer::adam;
            else if (opt == "pgd") m.skmm.optimizer = SkmmOptimizer::pgd;
            else throw std::invalid_argument("plan: unknown optimizer " + opt);
        } else if (key == "sampling") {
            const std::string s = value.get<std::string>();
            if (s == "weighted") m.skmm.sampling = SamplingMode::weighted;
            else if (s == "top_n") m.skmm.sampling = SamplingMode::top_n;
            else throw std::invalid_argument("plan: unknown sampling mode " + s);
        } else if (key == "keep_best") m.skmm.keep_best = value.get<bool>();
        else if (key == "drop_null") m.skmm.drop_null_directions = value.get<bool>();
        else if (key == "k") m.leverage_k = value.get<std::size_t>();
        else if (key == "rho") m.leverage_rho = value.get<double>();
    }
    return m;
}

}  // namespace

BenchPlan parse_bench_plan(const std::string& json_text) {
    njson j;
    try {
        j = njson::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("plan: invalid JSON: ") + e.what());
    }
    BenchPlan plan;
    try {
        plan.dataset_path = j.at("dataset").get<std::string>();
        plan.labels_path = j.at("labels").get<std::string>();
        for (const auto& mj : j.at("methods")) plan.methods.push_back(parse_method(mj));
        plan.budgets = j.at("budgets").get<std::vector<std::size_t>>();
        plan.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("output")) plan.output_path = j["output"].get<std::string>();
        if (j.contains("evaluator")) {
            const auto& ev = j["evaluator"];
            if (ev.contains("folds")) plan.folds = ev["folds"].get<std::size_t>();
            if (ev.contains("grid")) plan.alpha_grid = ev["grid"].get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("plan: bad field: ") + e.what());
    }
    if (plan.methods.empty()) throw std::invalid_argument("plan: methods must be nonempty");
    if (plan.budgets.empty()) throw std::invalid_argument("plan: budgets must be nonempty");
    for (std::size_t i = 0; i < plan.budgets.size(); ++i) {
        if (plan.budgets[i] == 0) throw std::invalid_argument("plan: budgets must be positive");
        if (i > 0 && plan.budgets[i] <= plan.budgets[i - 1])
            throw std::invalid_argument("plan: budgets must be strictly ascending");
    }
    if (plan.seeds.empty()) throw std::invalid_argument("plan: seeds must be nonempty");
    for (std::size_t i = 0; i < plan.seeds.size(); ++i)
        for (std::size_t k = i + 1; k < plan.seeds.size(); ++k)
            if (plan.seeds[i] == plan.seeds[k])
                throw std::invalid_argument("plan: seeds must be distinct");
    if (plan.folds < 2) throw std::invalid_argument("plan: folds must be at least 2");
    return plan;
}

Selection run_selector(const MethodConfig& method, const DenseMatrix& x,
                       const DenseMatrix* sketched, const std::vector<double>* scores,
                       std::size_t budget, std::uint64_t seed) {
    if (method.name == "uniform") return uniform_select(x.rows(), budget, seed);
    if (method.name == "herding") return herding_select(x, budget);
    if (method.name == "kcenter") return kcenter_select(x, budget, seed);
    if (method.name == "adaptive") return adaptive_select(x, budget, seed);
    if (is_leverage(method.name)) {
        const LeverageVariant variant = variant_for(method.name);
        if (scores) return leverage_select_scored(*scores, budget, variant, seed);
        std::optional<std::size_t> k;
        std::optional<double> rho;
        if (variant == LeverageVariant::truncated) k = method.leverage_k;
        if (variant == LeverageVariant::ridge) rho = method.leverage_rho;
        return leverage_select(x, budget, variant, k, rho, seed);
    }
    if (method.name == "skmm") {
        if (sketched == nullptr) {
            SketchOperator op =
                method.sketch_kind == SketchKind::gaussian
                    ? build_gaussian_sketch(x.cols(), method.sketch_dim, seed)
                    : build_sparse_sign_sketch(x.cols(), method.sketch_dim,
                                               method.sketch_sparsity, seed);
            DenseMatrix local = apply_sketch(x, op);
            return skmm_optimize(local, budget, method.skmm, seed);
        }
        return skmm_optimize(*sketched, budget, method.skmm, seed);
    }
    throw std::invalid_argument("unknown method " + method.name);
}

std::vector<BenchCell> run_bench(const BenchPlan& plan, const DenseMatrix& x,
                                 const std::vector<double>& y, std::size_t jobs) {
    if (y.size() != x.rows())
        throw std::invalid_argument("bench: labels must match dataset rows");
    if (plan.budgets.back() > x.rows())
        throw std::invalid_argument("bench: largest budget exceeds dataset size");
    const std::vector<double> grid =
        plan.alpha_grid.empty() ? default_alpha_grid() : plan.alpha_grid;

    GramCache cache(x, y);

    // Shared per-method inputs, built before the pool starts.
    std::vector<std::vector<double>> scores(plan.methods.size());
    std::map<std::pair<std::size_t, std::uint64_t>, DenseMatrix> sketches;
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
        const MethodConfig& m = plan.methods[mi];
        if (is_leverage(m.name)) {
            const LeverageVariant variant = variant_for(m.name);
            std::optional<std::size_t> k;
            std::optional<double> rho;
            if (variant == LeverageVariant::truncated) k = m.leverage_k;
            if (variant == LeverageVariant::ridge) rho = m.leverage_rho;
            scores[mi] = leverage_scores(x, variant, k, rho);
        } else if (m.name == "skmm") {
            for (std::uint64_t seed : plan.seeds) {
                SketchOperator op =
                    m.sketch_kind == SketchKind::gaussian
                        ? build_gaussian_sketch(x.cols(), m.sketch_dim, seed)
                        : build_sparse_sign_sketch(x.cols(), m.sketch_dim, m.sketch_sparsity,
                                                   seed);
                sketches.emplace(std::make_pair(mi, seed), apply_sketch(x, op));
            }
        }
    }

    struct Task {
        std::size_t mi, bi, si;
    };
    std::vector<Task> tasks;
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi)
        for (std::size_t bi = 0; bi < plan.budgets.size(); ++bi)
            for (std::size_t si = 0; si < plan.seeds.size(); ++si)
                tasks.push_back({mi, bi, si});
    std::vector<double> risks(tasks.size(), 0.0);

    // Unseeded methods share one selection per budget.
    std::mutex memo_mu;
    std::map<std::pair<std::size_t, std::size_t>, std::shared_future<Selection>> memo;
    auto selection_for = [&](const Task& t) -> Selection {
        const MethodConfig& m = plan.methods[t.mi];
        const std::uint64_t seed = plan.seeds[t.si];
        const DenseMatrix* sk = nullptr;
        if (m.name == "skmm") sk = &sketches.at({t.mi, seed});
        const std::vector<double>* sc = is_leverage(m.name) ? &scores[t.mi] : nullptr;
        if (is_seeded(m.name)) return run_selector(m, x, sk, sc, plan.budgets[t.bi], seed);

        const auto key = std::make_pair(t.mi, t.bi);
        std::promise<Selection> prom;
        std::shared_future<Selection> fut;
        bool owner = false;
        {
            std::lock_guard<std::mutex> lock(memo_mu);
            auto it = memo.find(key);
            if (it == memo.end()) {
                fut = prom.get_future().share();
                memo.emplace(key, fut);
                owner = true;
            } else {
                fut = it->second;
            }
        }
        if (owner) {
            try {
                prom.set_value(run_selector(m, x, sk, sc, plan.budgets[t.bi], seed));
            } catch (...) {
                prom.set_exception(std::current_exception());
            }
        }
        return fut.get();
    };

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            {
                std::lock_guard<std::mutex> lock(err_mu);
                if (first_error) break;
            }
            try {
                const Task& t = tasks[i];
                Selection sel = selection_for(t);
                EvalReport report =
                    cache.evaluate(sel.indices, grid, plan.folds, plan.seeds[t.si]);
                risks[i] = report.empirical_risk;
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<BenchCell> cells;
    const std::size_t ns = plan.seeds.size();
    const std::size_t nb = plan.budgets.size();
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
        for (std::size_t bi = 0; bi < nb; ++bi) {
            const std::size_t base = (mi * nb + bi) * ns;
            double mean = 0.0;
            for (std::size_t si = 0; si < ns; ++si) mean += risks[base + si];
            mean /= static_cast<double>(ns);
            double var = 0.0;
            for (std::size_t si = 0; si < ns; ++si) {
                const double d = risks[base + si] - mean;
                var += d * d;
            }
            const double std_risk =
                ns > 1 ? std::sqrt(var / static_cast<double>(ns - 1)) : 0.0;
            cells.push_back(
                {plan.methods[mi].name, plan.budgets[bi], ns, mean, std_risk});
        }
    }
    return cells;
}

std::string bench_csv(const std::vector<BenchCell>& cells) {
    std::string out = "method,n,seeds,mean_risk,std_risk\n";
    for (const auto& c : cells) {
        out += c.method;
        out += ',';
        out += std::to_string(c.budget);
        out += ',';
        out += std::to_string(c.seed_count);
        out += ',';
        out += format_double(c.mean_risk);
        out += ',';
        out += format_double(c.std_risk);
        out += '\n';
    }
    return out;
}

}  // namespace skmm
