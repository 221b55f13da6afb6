#include "skmm/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "skmm/kernels.hpp"
#include "skmm/rng.hpp"

namespace skmm {
namespace {

constexpr std::uint64_t kInitTag = 0x494e4954ULL;
constexpr std::uint64_t kSampleTag = 0x53414d50ULL;
constexpr std::uint64_t kStartTag = 0x53545254ULL;
constexpr std::uint64_t kDrawTag = 0x44524157ULL;
constexpr std::uint64_t kPadTag = 0x50414444ULL;

void check_budget(std::size_t population, std::size_t n) {
    if (n == 0) throw std::invalid_argument("selector: budget must be positive");
    if (n > population) throw std::invalid_argument("selector: budget exceeds population");
}

std::vector<std::size_t> sorted_copy(std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Core weighted without-replacement draw over raw nonnegative weights.
// Recomputes the remaining mass each draw, so exhausted positive mass is
// detected exactly; the remainder is filled uniformly over unchosen indices.
std::vector<std::size_t> weighted_wor(const std::vector<double>& w, std::size_t n, Rng& rng,
                                      bool& padded) {
    const std::size_t total = w.size();
    check_budget(total, n);
    double wmax = 0.0;
    for (double x : w) {
        if (!std::isfinite(x)) throw std::invalid_argument("sampler: non-finite weight");
        wmax = std::max(wmax, std::fabs(x));
    }
    for (double x : w)
        if (x < -1e-12 * (wmax > 0.0 ? wmax : 1.0))
            throw std::invalid_argument("sampler: negative weight");

    std::vector<char> chosen(total, 0);
    std::vector<std::size_t> out;
    out.reserve(n);
    padded = false;
    while (out.size() < n) {
        double mass = 0.0;
        for (std::size_t i = 0; i < total; ++i)
            if (!chosen[i] && w[i] > 0.0) mass += w[i];
        if (mass <= 0.0) break;
        const double u = rng.next_double() * mass;
        double cum = 0.0;
        std::size_t pick = total;
        for (std::size_t i = 0; i < total; ++i) {
            if (chosen[i] || w[i] <= 0.0) continue;
            cum += w[i];
            if (u < cum) {
                pick = i;
                break;
            }
        }
        if (pick == total) {
            // Roundoff pushed u past the last positive weight; take it.
            for (std::size_t i = total; i-- > 0;)
                if (!chosen[i] && w[i] > 0.0) {
                    pick = i;
                    break;
                }
        }
        chosen[pick] = 1;
        out.push_back(pick);
    }
    if (out.size() < n) {
        padded = true;
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < total; ++i)
            if (!chosen[i]) rest.push_back(i);
        Rng pad_rng = rng.substream(kPadTag);
        std::vector<std::size_t> fill;
        sample_indices_uniform(rest.size(), n - out.size(), pad_rng, fill);
        for (std::size_t f : fill) out.push_back(rest[f]);
    }
    return out;
}

std::vector<std::size_t> top_n_indices(const std::vector<double>& w, std::size_t n,
                                       bool& padded) {
    check_budget(w.size(), n);
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] > w[b];
        return a < b;
    });
    order.resize(n);
    padded = false;
    for (std::size_t i : order)
        if (w[i] <= 0.0) padded = true;
    return order;
}

struct ObjectiveParts {
    double value = 0.0;
    std::vector<double> q;
};

// Objective pieces from precomputed projections P = Gs * V; q reused for the
// gradient so each iteration touches P once per pass.
ObjectiveParts objective_from_projections(const DenseMatrix& proj,
                                          const std::vector<double>& lambda,
                                          const std::vector<double>& s, double c_s,
                                          bool drop_null) {
    const auto& k = kernels::active();
    ObjectiveParts parts;
    parts.q.assign(lambda.size(), 0.0);
    k.weighted_colsq(proj.data(), s.data(), proj.rows(), proj.cols(), parts.q.data());
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (lambda[j] > 0.0) {
            const double deficit = std::max(0.0, lambda[j] / c_s - parts.q[j]);
            parts.value += deficit * deficit;
        } else if (!drop_null) {
            parts.value += parts.q[j] * parts.q[j];
        }
    }
    return parts;
}

void gradient_from_projections(const DenseMatrix& proj, const std::vector<double>& lambda,
                               const std::vector<double>& q, double c_s, bool drop_null,
                               std::vector<double>& grad) {
    std::vector<double> coef(lambda.size(), 0.0);
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (lambda[j] > 0.0)
            coef[j] = -2.0 * std::max(0.0, lambda[j] / c_s - q[j]);
        else if (!drop_null)
            coef[j] = 2.0 * q[j];
    }
    grad.assign(proj.rows(), 0.0);
    kernels::active().colsq_combine(proj.data(), coef.data(), proj.rows(), proj.cols(),
                                    grad.data());
}

DenseMatrix projections(const DenseMatrix& sketched, const SpectralDecomposition& spec) {
    const std::size_t n = sketched.rows();
    const std::size_t m = sketched.cols();
    if (spec.eigenvectors.rows() != m || spec.eigenvalues.size() != m)
        throw std::invalid_argument("skmm: spectral decomposition does not match sketch width");
    DenseMatrix proj(n, m);
    kernels::active().matmul(sketched.data(), spec.eigenvectors.data(), proj.data(), n, m, m);
    return proj;
}

// The objective is a polynomial in s, well defined off the simplex; only the
// optimizer enforces feasibility. Finite-difference probes rely on this.
void validate_objective_inputs(const SelectionWeights& s, const DenseMatrix& sketched,
                               double c_s) {
    if (s.budget == 0) throw std::invalid_argument("weights: budget must be positive");
    if (s.values.size() != sketched.rows())
        throw std::invalid_argument("skmm: weights length must equal sketch rows");
    if (!(c_s > 0.0)) throw std::invalid_argument("skmm: c_S must be positive");
    for (double v : s.values)
        if (!std::isfinite(v)) throw std::invalid_argument("skmm: non-finite weight");
}

}  // namespace

void validate_weights(const SelectionWeights& s) {
    if (s.budget == 0) throw std::invalid_argument("weights: budget must be positive");
    if (s.values.empty()) throw std::invalid_argument("weights: empty");
    const double cap = 1.0 / static_cast<double>(s.budget);
    double sum = 0.0;
    for (double v : s.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("weights: non-finite entry");
        if (v < -1e-12 || v > cap + 1e-12)
            throw std::invalid_argument("weights: entry outside [0, 1/n]");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-8) throw std::invalid_argument("weights: must sum to 1");
}

SkmmObjective skmm_objective(const SelectionWeights& s, const DenseMatrix& sketched,
                             const SpectralDecomposition& spec, double c_s, bool drop_null) {
    validate_objective_inputs(s, sketched, c_s);
    DenseMatrix proj = projections(sketched, spec);
    ObjectiveParts parts =
        objective_from_projections(proj, spec.eigenvalues, s.values, c_s, drop_null);
    SkmmObjective out;
    out.value = parts.value;
    out.q = std::move(parts.q);
    out.gamma.resize(spec.eigenvalues.size());
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
        const double lam = spec.eigenvalues[j];
        out.gamma[j] = (lam > 0.0) ? std::max(1.0 / c_s, out.q[j] / lam) : 1.0 / c_s;
    }
    return out;
}

std::vector<double> skmm_gradient(const SelectionWeights& s, const DenseMatrix& sketched,
                                  const SpectralDecomposition& spec, double c_s,
                                  bool drop_null) {
    validate_objective_inputs(s, sketched, c_s);
    DenseMatrix proj = projections(sketched, spec);
    ObjectiveParts parts =
        objective_from_projections(proj, spec.eigenvalues, s.values, c_s, drop_null);
    std::vector<double> grad;
    gradient_from_projections(proj, spec.eigenvalues, parts.q, c_s, drop_null, grad);
    return grad;
}

std::vector<double> project_capped_simplex(const std::vector<double>& v, double cap) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("projection: empty input");
    if (!(cap > 0.0)) throw std::invalid_argument("projection: cap must be positive");
    if (static_cast<double>(n) * cap < 1.0 - 1e-9)
        throw std::invalid_argument("projection: infeasible, N * cap < 1");
    double vmax = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw numeric_error("projection: non-finite input");
        vmax = std::max(vmax, std::fabs(x));
    }

    // Threshold characterization s_i = clip(v_i - tau, 0, cap): the mass
    // g(tau) = sum_i s_i is piecewise linear and nonincreasing, with
    // breakpoints at v_i (zero -> free) and v_i - cap (free -> capped).
    // Sweep segments from large tau down; within a segment with `nfree` free
    // elements, g(tau) = ncap*cap + sumfree - nfree*tau.
    struct Event {
        double tau;
        double value;
        bool to_free;
    };
    std::vector<Event> events;
    events.reserve(2 * n);
    for (double x : v) {
        events.push_back({x, x, true});
        events.push_back({x - cap, x, false});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.tau > b.tau; });

    const double tol = 1e-12 * (vmax + cap + 1.0);
    double tau = std::numeric_limits<double>::quiet_NaN();
    std::size_t nfree = 0, ncap = 0;
    double sumfree = 0.0;
    for (const Event& e : events) {
        // Segment above this event. g is monotone, so the first candidate
        // lying above the segment's lower end is the root.
        if (nfree > 0) {
            const double cand =
                (static_cast<double>(ncap) * cap + sumfree - 1.0) / static_cast<double>(nfree);
            if (cand >= e.tau - tol) {
                tau = cand;
                break;
            }
        } else if (std::fabs(static_cast<double>(ncap) * cap - 1.0) <= 1e-9) {
            tau = e.tau;
            break;
        }
        if (e.to_free) {
            ++nfree;
            sumfree += e.value;
        } else {
            --nfree;
            sumfree -= e.value;
            ++ncap;
        }
    }
    if (std::isnan(tau)) tau = events.back().tau;  // all capped: N*cap == 1

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::clamp(v[i] - tau, 0.0, cap);
    return s;
}

std::vector<std::size_t> sample_without_replacement(const SelectionWeights& s, std::size_t n,
                                                    std::uint64_t seed, SamplingMode mode,
                                                    bool* padded) {
    validate_weights(s);
    bool did_pad = false;
    std::vector<std::size_t> idx;
    if (mode == SamplingMode::top_n) {
        idx = top_n_indices(s.values, n, did_pad);
    } else {
        Rng rng = Rng(seed).substream(kDrawTag);
        idx = weighted_wor(s.values, n, rng, did_pad);
    }
    if (padded) *padded = did_pad;
    return sorted_copy(std::move(idx));
}

Selection skmm_optimize(const DenseMatrix& sketched, std::size_t n, const SkmmConfig& config,
                        std::uint64_t seed) {
    const std::size_t population = sketched.rows();
    const std::size_t m = sketched.cols();
    check_budget(population, n);
    if (population == 0 || m == 0) throw std::invalid_argument("skmm: empty sketch matrix");
    if (n < population && m >= n)
        throw std::invalid_argument("skmm: budget must exceed the sketch dimension");
    const double ratio = static_cast<double>(n) / static_cast<double>(population);
    if (config.c_s < ratio - 1e-12 || config.c_s > 1.0 + 1e-12)
        throw std::invalid_argument("skmm: c_S must lie in [n/N, 1]");
    if (!(config.learning_rate > 0.0))
        throw std::invalid_argument("skmm: learning rate must be positive");

    Selection sel;
    sel.method = "skmm";
    sel.seed = seed;
    sel.sampling_mode = config.sampling == SamplingMode::top_n ? "top_n" : "weighted";

    MomentMatrix moment = second_moment(sketched);
    SpectralDecomposition spec = spectral_decomposition(moment);
    DenseMatrix proj = projections(sketched, spec);

    const double cap = 1.0 / static_cast<double>(n);
    Rng root(seed);

    std::vector<double> s;
    if (n == population) {
        s.assign(population, cap);
    } else {
        Rng init_rng = root.substream(kInitTag);
        std::vector<std::size_t> start;
        sample_indices_uniform(population, n, init_rng, start);
        s.assign(population, 0.0);
        for (std::size_t i : start) s[i] = cap;
    }

    ObjectiveParts parts =
        objective_from_projections(proj, spec.eigenvalues, s, config.c_s,
                                   config.drop_null_directions);
    if (!std::isfinite(parts.value))
        throw numeric_error("skmm: non-finite objective (check inputs or learning rate)");
    const std::size_t stride = config.trace_stride == 0 ? 1 : config.trace_stride;
    sel.objective_trace.emplace_back(0, parts.value);

    double best_value = parts.value;
    std::vector<double> best_s = s;

    if (n < population && config.iterations > 0) {
        std::vector<double> grad, m1, m2, cand;
        if (config.optimizer == SkmmOptimizer::adam) {
            m1.assign(population, 0.0);
            m2.assign(population, 0.0);
        }
        cand.resize(population);
        double beta1_pow = 1.0, beta2_pow = 1.0;
        for (std::size_t t = 1; t <= config.iterations; ++t) {
            gradient_from_projections(proj, spec.eigenvalues, parts.q, config.c_s,
                                      config.drop_null_directions, grad);
            if (config.optimizer == SkmmOptimizer::adam) {
                beta1_pow *= config.beta1;
                beta2_pow *= config.beta2;
                const double bc1 = 1.0 - beta1_pow;
                const double bc2 = 1.0 - beta2_pow;
                for (std::size_t i = 0; i < population; ++i) {
                    m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * grad[i];
                    m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * grad[i] * grad[i];
                    const double mhat = m1[i] / bc1;
                    const double vhat = m2[i] / bc2;
                    cand[i] = s[i] - config.learning_rate * mhat /
                                         (std::sqrt(vhat) + config.adam_eps);
                }
            } else {
                for (std::size_t i = 0; i < population; ++i)
                    cand[i] = s[i] - config.learning_rate * grad[i];
            }
            s = project_capped_simplex(cand, cap);
            parts = objective_from_projections(proj, spec.eigenvalues, s, config.c_s,
                                               config.drop_null_directions);
            if (!std::isfinite(parts.value))
                throw numeric_error("skmm: objective diverged (learning rate too large)");
            if (parts.value < best_value) {
                best_value = parts.value;
                best_s = s;
            }
            if (t % stride == 0 || t == config.iterations)
                sel.objective_trace.emplace_back(t, parts.value);
        }
    }

    const std::vector<double>& chosen = config.keep_best ? best_s : s;
    SelectionWeights weights;
    weights.values = chosen;
    weights.budget = n;

    bool did_pad = false;
    if (n == population) {
        sel.indices.resize(population);
        std::iota(sel.indices.begin(), sel.indices.end(), 0);
    } else if (config.sampling == SamplingMode::top_n) {
        sel.indices = sorted_copy(top_n_indices(weights.values, n, did_pad));
    } else {
        Rng draw_rng = root.substream(kSampleTag);
        sel.indices = sorted_copy(weighted_wor(weights.values, n, draw_rng, did_pad));
    }
    sel.padded = did_pad;
    sel.weights = std::move(weights);
    return sel;
}

Selection uniform_select(std::size_t population, std::size_t n, std::uint64_t seed) {
    check_budget(population, n);
    Selection sel;
    sel.method = "uniform";
    sel.seed = seed;
    sel.sampling_mode = "uniform";
    Rng rng = Rng(seed).substream(kDrawTag);
    std::vector<std::size_t> idx;
    sample_indices_uniform(population, n, rng, idx);
    sel.indices = sorted_copy(std::move(idx));
    return sel;
}

Selection herding_select(const DenseMatrix& features, std::size_t n) {
    const std::size_t population = features.rows();
    const std::size_t d = features.cols();
    check_budget(population, n);
    const auto& k = kernels::active();

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < population; ++i) k.axpy(1.0, features.row(i), mean.data(), d);
    k.scal(1.0 / static_cast<double>(population), mean.data(), d);

    std::vector<double> w = mean;
    std::vector<char> chosen(population, 0);
    Selection sel;
    sel.method = "herding";
    sel.sampling_mode = "deterministic";
    sel.indices.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t pick = population;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < population; ++i) {
            if (chosen[i]) continue;
            const double score = k.dot(w.data(), features.row(i), d);
            if (score > best) {
                best = score;
                pick = i;
            }
        }
        chosen[pick] = 1;
        sel.indices.push_back(pick);
        k.axpy(1.0, mean.data(), w.data(), d);
        k.axpy(-1.0, features.row(pick), w.data(), d);
    }
    sel.indices = sorted_copy(std::move(sel.indices));
    return sel;
}

Selection kcenter_select(const DenseMatrix& features, std::size_t n, std::uint64_t seed) {
    const std::size_t population = features.rows();
    const std::size_t d = features.cols();
    check_budget(population, n);
    const auto& k = kernels::active();

    Selection sel;
    sel.method = "kcenter";
    sel.seed = seed;
    sel.sampling_mode = "greedy";
    Rng rng = Rng(seed).substream(kStartTag);
    const std::size_t start = static_cast<std::size_t>(rng.next_below(population));

    std::vector<double> norms(population);
    for (std::size_t i = 0; i < population; ++i) norms[i] = k.sumsq(features.row(i), d);

    std::vector<double> mindist(population);
    std::vector<char> chosen(population, 0);
    auto absorb_center = [&](std::size_t c, bool init) {
        const double* fc = features.row(c);
        for (std::size_t i = 0; i < population; ++i) {
            const double cross = k.dot(features.row(i), fc, d);
            const double dist = std::max(norms[i] - 2.0 * cross + norms[c], 0.0);
            if (init || dist < mindist[i]) mindist[i] = dist;
        }
    };

    chosen[start] = 1;
    sel.indices.push_back(start);
    absorb_center(start, true);
    while (sel.indices.size() < n) {
        std::size_t pick = population;
        double best = -1.0;
        for (std::size_t i = 0; i < population; ++i) {
            if (chosen[i]) continue;
            if (mindist[i] > best) {
                best = mindist[i];
                pick = i;
            }
        }
        chosen[pick] = 1;
        sel.indices.push_back(pick);
        absorb_center(pick, false);
    }
    sel.indices = sorted_copy(std::move(sel.indices));
    return sel;
}

Selection adaptive_select(const DenseMatrix& features, std::size_t n, std::uint64_t seed) {
    const std::size_t population = features.rows();
    const std::size_t d = features.cols();
    check_budget(population, n);
    const auto& k = kernels::active();

    Selection sel;
    sel.method = "adaptive";
    sel.seed = seed;
    sel.sampling_mode = "weighted";
    Rng rng = Rng(seed).substream(kDrawTag);

    DenseMatrix residual = features;
    std::vector<char> chosen(population, 0);
    std::vector<double> unit(d);
    // Residual squared norms are maintained incrementally (each deflation
    // subtracts coef^2) and refreshed exactly at a fixed stride to stop drift.
    std::vector<double> norms(population);
    auto refresh_norms = [&]() {
        for (std::size_t i = 0; i < population; ++i) norms[i] = k.sumsq(residual.row(i), d);
    };
    refresh_norms();
    double initial_mass = 0.0;
    for (double v : norms) initial_mass += v;
    const double floor = std::max(initial_mass, 1.0) * 1e-14;
    constexpr std::size_t kRefreshStride = 16;

    while (sel.indices.size() < n) {
        if (sel.indices.size() % kRefreshStride == 0 && !sel.indices.empty()) refresh_norms();
        double mass = 0.0;
        for (std::size_t i = 0; i < population; ++i)
            if (!chosen[i]) mass += norms[i];
        if (mass <= floor) break;
        const double u = rng.next_double() * mass;
        double cum = 0.0;
        std::size_t pick = population;
        for (std::size_t i = 0; i < population; ++i) {
            if (chosen[i]) continue;
            cum += norms[i];
            if (u < cum) {
                pick = i;
                break;
            }
        }
        if (pick == population) {
            for (std::size_t i = population; i-- > 0;)
                if (!chosen[i] && norms[i] > 0.0) {
                    pick = i;
                    break;
                }
            if (pick == population) break;
        }
        chosen[pick] = 1;
        sel.indices.push_back(pick);

        const double norm = std::sqrt(k.sumsq(residual.row(pick), d));
        if (norm > 0.0) {
            const double inv = 1.0 / norm;
            for (std::size_t j = 0; j < d; ++j) unit[j] = residual.row(pick)[j] * inv;
            for (std::size_t i = 0; i < population; ++i) {
                double* row = residual.row(i);
                const double coef = k.dot(row, unit.data(), d);
                k.axpy(-coef, unit.data(), row, d);
                norms[i] = std::max(norms[i] - coef * coef, 0.0);
            }
        }
    }
    if (sel.indices.size() < n) {
        sel.padded = true;
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < population; ++i)
            if (!chosen[i]) rest.push_back(i);
        Rng pad_rng = rng.substream(kPadTag);
        std::vector<std::size_t> fill;
        sample_indices_uniform(rest.size(), n - sel.indices.size(), pad_rng, fill);
        for (std::size_t f : fill) sel.indices.push_back(rest[f]);
    }
    sel.indices = sorted_copy(std::move(sel.indices));
    return sel;
}

Selection leverage_select(const DenseMatrix& features, std::size_t n, LeverageVariant variant,
                          std::optional<std::size_t> k, std::optional<double> rho,
                          std::uint64_t seed) {
    check_budget(features.rows(), n);
    return leverage_select_scored(leverage_scores(features, variant, k, rho), n, variant, seed);
}

Selection leverage_select_scored(const std::vector<double>& scores, std::size_t n,
                                 LeverageVariant variant, std::uint64_t seed) {
    check_budget(scores.size(), n);
    Selection sel;
    switch (variant) {
        case LeverageVariant::plain: sel.method = "leverage"; break;
        case LeverageVariant::truncated: sel.method = "t_leverage"; break;
        case LeverageVariant::ridge: sel.method = "r_leverage"; break;
    }
    sel.seed = seed;
    sel.sampling_mode = "weighted";
    Rng rng = Rng(seed).substream(kDrawTag);
    bool did_pad = false;
    sel.indices = sorted_copy(weighted_wor(scores, n, rng, did_pad));
    sel.padded = did_pad;
    return sel;
}

}  // namespace skmm
