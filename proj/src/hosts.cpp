#include "pils/hosts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace pils {

const char* to_string(HostKind kind) { return kind == HostKind::Hgs ? "hgs" : "gls"; }

HostConfig HostConfig::baseline(const Instance& inst, HostKind host) {
    HostConfig c;
    c.host = host;
    c.phi_freq = 5 * inst.n();
    c.phi_size = inst.n();
    c.p_ex = host == HostKind::Hgs ? 0.1 : 1.0;
    return c;
}

void HostConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (!(t_max > 0)) fail("t_max must be positive");
    if (p_ex < 0 || p_ex > 1) fail("p_ex must lie in [0, 1]");
    if (phi_freq < 0 || phi_size < 0) fail("phi_freq and phi_size must be nonnegative");
    if (phi_size > phi_freq) fail("phi_size must not exceed phi_freq");
    if (l_min < 2 || l_max < l_min) fail("need 2 <= l_min <= l_max");
    if (max_routes < 1) fail("max_routes must be positive");
    if (mu < 1 || lambda < 1 || it_div < 1) fail("mu, lambda and it_div must be positive");
    if (granularity < 1) fail("granularity must be positive");
    if (gls_weight_factor <= 0) fail("gls weight factor must be positive");
    if (snapshot_fraction > 1) fail("snapshot fraction must not exceed 1");
}

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
  public:
    Recorder(const HostConfig& cfg, RunResult& res) : cfg_(cfg), res_(res), start_(Clock::now()) {}

    double now_ms() const {
        return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }

    bool exhausted() const {
        if (cfg_.max_iterations >= 0 && res_.iterations >= cfg_.max_iterations) return true;
        return now_ms() >= cfg_.t_max * 1000.0;
    }

    // Runs f, books its duration under `event`.
    template <class F>
    void step(const char* event, bool pils, F&& f) {
        const double t0 = now_ms();
        const Cost c = f();
        const double t1 = now_ms();
        const double d = t1 - t0;
        res_.phase_ms[event] += d;
        if (pils) res_.pils_ms += d;
        if (cfg_.keep_events) res_.events.push_back(RunEvent{t1, event, c, res_.pils_ms, d});
    }

    bool offer(const Instance& inst, const Solution& s) {
        if (!is_feasible(inst, s)) return false;
        const Cost c = s.total_distance();
        if (c >= res_.best_cost) return false;
        res_.best = s;
        res_.best_cost = c;
        RunEvent e{now_ms(), "new_best", c, res_.pils_ms, 0};
        res_.best_trace.push_back(e);
        if (cfg_.keep_events) res_.events.push_back(e);
        return true;
    }

    void maybe_snapshot(const PatternPool& pool) {
        if (taken_ || cfg_.snapshot_fraction <= 0) return;
        const bool by_time = now_ms() >= cfg_.snapshot_fraction * cfg_.t_max * 1000.0;
        const bool by_iter = cfg_.max_iterations > 0 &&
                             res_.iterations >= std::llround(cfg_.snapshot_fraction * cfg_.max_iterations);
        if (!by_time && !by_iter) return;
        res_.pool_snapshot = pool;
        res_.snapshot_best_cost = res_.best_cost;
        taken_ = true;
    }

    void finish(PatternPool&& pool) {
        maybe_snapshot(pool);
        if (cfg_.snapshot_fraction > 0 && !taken_) {
            res_.pool_snapshot = pool;
            res_.snapshot_best_cost = res_.best_cost;
        }
        res_.pool = std::move(pool);
        res_.wall_ms = now_ms();
        res_.best.normalize();
    }

  private:
    const HostConfig& cfg_;
    RunResult& res_;
    Clock::time_point start_;
    bool taken_ = false;
};

std::uint64_t pils_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ull; }

bool draw_extraction(double p_ex, std::mt19937_64& prng) {
    if (p_ex <= 0) return false;
    return std::uniform_real_distribution<double>(0.0, 1.0)(prng) < p_ex;
}

void sort_population(Population& pop) {
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) { return a.cost < b.cost; });
}

void select_survivors(Population& pop, std::size_t mu) {
    sort_population(pop);
    std::set<std::vector<std::vector<int>>> seen;
    Population kept;
    for (auto& ind : pop) {
        if (kept.size() == mu) break;
        if (!seen.insert(ind.sol.canonical_routes()).second) continue;
        kept.push_back(std::move(ind));
    }
    pop = std::move(kept);
}

Solution random_giant_tour_solution(const Instance& inst, std::mt19937_64& rng) {
    std::vector<int> tour(inst.n());
    std::iota(tour.begin(), tour.end(), 1);
    std::shuffle(tour.begin(), tour.end(), rng);
    return split(inst, tour);
}

}  // namespace

void diversify(Population& pop, const Instance& inst, LocalSearch& ls, const CostParams& params,
               std::mt19937_64& rng) {
    const std::size_t size = pop.size();
    if (size <= 1) return;
    sort_population(pop);
    pop.resize((size + 1) / 2);
    while (pop.size() < size) {
        Solution s = ls.descend(construct_initial(inst, rng), params, rng);
        if (!is_feasible(inst, s)) s = repair(inst, s, ls, rng);
        const Cost c = s.total_distance();
        pop.push_back(Individual{std::move(s), c});
    }
    sort_population(pop);
}

RunResult run_hgs_pils(const Instance& inst, const HostConfig& cfg) {
    cfg.validate();
    RunResult res;
    Recorder rec(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    std::mt19937_64 prng(pils_seed(cfg.seed));
    LocalSearch ls(inst, {cfg.granularity});
    const CostParams penalized = CostParams::defaults_for(inst, FeasibilityMode::Penalized);
    PatternPool pool({cfg.l_min, cfg.l_max, cfg.phi_freq});
    InjectionOptions iopt;
    iopt.max_routes = cfg.max_routes;

    auto educate = [&](Solution s) {
        rec.step("ls", false, [&] {
            s = ls.descend(s, penalized, rng);
            if (!is_feasible(inst, s)) s = repair(inst, s, ls, rng);
            return s.total_distance();
        });
        if (draw_extraction(cfg.p_ex, prng))
            rec.step("pils_extract", true, [&] {
                pool.extract(s, s.total_distance());
                return s.total_distance();
            });
        return s;
    };

    Population pop;
    while (pop.size() < static_cast<std::size_t>(cfg.mu) && !rec.exhausted()) {
        Solution s = educate(random_giant_tour_solution(inst, rng));
        rec.offer(inst, s);
        const Cost c = s.total_distance();
        pop.push_back(Individual{std::move(s), c});
    }
    sort_population(pop);

    std::int64_t stagnation = 0;
    auto tournament = [&]() -> const Individual& {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        const Individual& a = pop[pick(rng)];
        const Individual& b = pop[pick(rng)];
        return b.cost < a.cost ? b : a;
    };

    while (!pop.empty() && !rec.exhausted()) {
        ++res.iterations;
        Solution child;
        rec.step("crossover", false, [&] {
            const auto t1 = tournament().sol.giant_tour();
            const auto t2 = tournament().sol.giant_tour();
            child = split(inst, ox_crossover(t1, t2, rng));
            return child.total_distance();
        });
        if (cfg.phi_size > 0) {
            auto candidates = pool.sample_candidates(cfg.phi_size, prng);
            if (!candidates.empty())
                rec.step("pils_inject", true, [&] {
                    pils_pass(inst, child, std::move(candidates), penalized, prng, iopt, &res.moves);
                    return solution_cost(inst, child, penalized);
                });
        }
        child = educate(std::move(child));
        const Cost c = child.total_distance();
        if (rec.offer(inst, child))
            stagnation = 0;
        else
            ++stagnation;
        pop.push_back(Individual{std::move(child), c});
        if (pop.size() >= static_cast<std::size_t>(cfg.mu + cfg.lambda))
            select_survivors(pop, cfg.mu);
        else
            sort_population(pop);
        if (stagnation >= cfg.it_div) {
            rec.step("diversify", false, [&] {
                diversify(pop, inst, ls, penalized, rng);
                return pop.front().cost;
            });
            for (const auto& ind : pop) rec.offer(inst, ind.sol);
            stagnation = 0;
        }
        rec.maybe_snapshot(pool);
    }
    rec.finish(std::move(pool));
    return res;
}

RunResult run_gls_pils(const Instance& inst, const HostConfig& cfg) {
    cfg.validate();
    RunResult res;
    Recorder rec(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    std::mt19937_64 prng(pils_seed(cfg.seed));
    LocalSearch ls(inst, {cfg.granularity});
    const CostParams forbidden = CostParams::defaults_for(inst, FeasibilityMode::Forbidden);
    PatternPool pool({cfg.l_min, cfg.l_max, cfg.phi_freq});
    InjectionOptions iopt;
    iopt.max_routes = cfg.max_routes;

    Solution s;
    rec.step("ls", false, [&] {
        s = ls.descend(construct_initial(inst, rng), forbidden, rng);
        return s.total_distance();
    });
    rec.offer(inst, s);

    std::size_t edges = 0;
    for (const auto& r : s.routes) edges += r.empty() ? 0 : r.size() + 1;
    const double mean_edge = edges ? static_cast<double>(s.total_distance()) / edges : 1.0;
    const Cost weight = std::max<Cost>(1, std::llround(cfg.gls_weight_factor * mean_edge));
    EdgePenalties penalties(inst.vertex_count(), weight);

    while (!rec.exhausted()) {
        ++res.iterations;
        rec.step("penalize", false, [&] {
            penalize_edges(inst, s, penalties);
            return s.total_distance();
        });
        if (cfg.phi_size > 0) {
            auto candidates = pool.sample_candidates(cfg.phi_size, prng);
            if (!candidates.empty())
                rec.step("pils_inject", true, [&] {
                    pils_pass(inst, s, std::move(candidates), forbidden, prng, iopt, &res.moves);
                    return s.total_distance();
                });
        }
        rec.step("ls", false, [&] {
            s = ls.descend(s, forbidden, rng, &penalties);
            return s.total_distance();
        });
        rec.offer(inst, s);
        if (draw_extraction(cfg.p_ex, prng))
            rec.step("pils_extract", true, [&] {
                pool.extract(s, s.total_distance());
                return s.total_distance();
            });
        rec.maybe_snapshot(pool);
    }
    rec.finish(std::move(pool));
    return res;
}

RunResult run_host(const Instance& inst, const HostConfig& config) {
    return config.host == HostKind::Hgs ? run_hgs_pils(inst, config) : run_gls_pils(inst, config);
}

}  // namespace pils
