#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pils/injection.hpp"
#include "pils/operators.hpp"

namespace pils {

enum class HostKind { Hgs, Gls };

const char* to_string(HostKind kind);

struct HostConfig {
    HostKind host = HostKind::Hgs;
    double t_max = 60.0;                 // seconds of wall clock
    std::int64_t max_iterations = -1;    // < 0: no iteration budget
    double p_ex = 0.1;
    int phi_freq = 500;
    int phi_size = 100;
    int l_min = 3;
    int l_max = 5;
    int max_routes = 4;
    int mu = 25;
    int lambda = 40;
    int it_div = 500;
    int granularity = 20;
    double gls_weight_factor = 0.1;
    std::uint64_t seed = 1;
    double snapshot_fraction = -1;  // in (0, 1]: keep a pool copy at this share of t_max
    bool keep_events = true;

    // phi_freq = 5n, phi_size = n, p_ex 0.1 (HGS) or 1.0 (GLS).
    static HostConfig baseline(const Instance& inst, HostKind host);
    bool pils_enabled() const { return phi_size > 0 || p_ex > 0; }
    void disable_pils() {
        phi_size = 0;
        p_ex = 0;
    }
    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

struct RunEvent {
    double wall_ms = 0;
    std::string event;  // ls, pils_inject, pils_extract, crossover, penalize, diversify, new_best
    Cost cost = 0;
    double pils_cum_ms = 0;
    double phase_ms = 0;  // duration of this step (0 for new_best)
};

struct RunResult {
    Solution best;
    Cost best_cost = kInfeasible;
    std::int64_t iterations = 0;
    double wall_ms = 0;
    double pils_ms = 0;
    std::vector<RunEvent> events;          // every step when keep_events is set
    std::vector<RunEvent> best_trace;      // new_best events only, always kept
    std::vector<MoveRecord> moves;
    std::map<std::string, double> phase_ms;
    std::optional<PatternPool> pool;
    std::optional<PatternPool> pool_snapshot;
    Cost snapshot_best_cost = kInfeasible;

    double t_pils_pct() const { return wall_ms > 0 ? 100.0 * pils_ms / wall_ms : 0.0; }
};

struct Individual {
    Solution sol;
    Cost cost = 0;
};

// Sorted by cost, best first.
using Population = std::vector<Individual>;

// Keeps the best half (at least one), refills the rest with constructed and
// descended solutions. The size is unchanged.
void diversify(Population& pop, const Instance& inst, LocalSearch& ls, const CostParams& params,
               std::mt19937_64& rng);

RunResult run_hgs_pils(const Instance& inst, const HostConfig& config);
RunResult run_gls_pils(const Instance& inst, const HostConfig& config);
RunResult run_host(const Instance& inst, const HostConfig& config);

}  // namespace pils
