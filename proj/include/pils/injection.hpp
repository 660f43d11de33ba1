#pragma once

#include <random>
#include <vector>

#include "pils/reconnect.hpp"

namespace pils {

// One applied injection.
struct MoveRecord {
    int pattern_length = 0;
    int move_order = 0;  // edges of the touched routes that were replaced
    int routes = 0;
    Cost delta = 0;
};

struct InjectionOptions {
    int max_routes = 4;  // patterns spread over more routes are skipped
    ReconnectOptions reconnect;
};

struct PassStats {
    std::size_t candidates = 0;
    std::size_t contained = 0;
    std::size_t too_spread = 0;
    std::size_t reconnected = 0;
    std::size_t applied = 0;
    Cost delta = 0;
};

// Number of edges of `before` missing from `after` (undirected, with multiplicity).
int replaced_edges(const std::vector<std::vector<int>>& before,
                   const std::vector<std::vector<int>>& after);

// One sweep over the candidates in random order; every strictly improving
// reconnection is applied at once. Empty routes are dropped at the end.
PassStats pils_pass(const Instance& inst, Solution& sol, std::vector<Pattern> candidates,
                    const CostParams& params, std::mt19937_64& rng,
                    const InjectionOptions& opts = {}, std::vector<MoveRecord>* log = nullptr);

}  // namespace pils
