#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pils/instance.hpp"

namespace pils {

enum class FeasibilityMode { Penalized, Forbidden };

// Sentinel for the cost of a capacity-violating route in forbidden mode.
inline constexpr Cost kInfeasible = std::numeric_limits<Cost>::max() / 4;

// Route cost C = w * max(load - Q, 0) + D; forbidden mode is an infinite w.
struct CostParams {
    Cost penalty_per_unit = 1;
    FeasibilityMode mode = FeasibilityMode::Penalized;

    // w = 1 + max_edge / Q (integer), so that all costs stay integral.
    static CostParams defaults_for(const Instance& inst,
                                   FeasibilityMode mode = FeasibilityMode::Penalized);

    Cost cost(Load load, Cost distance, Load capacity) const {
        if (load <= capacity) return distance;
        if (mode == FeasibilityMode::Forbidden) return kInfeasible;
        return distance + penalty_per_unit * (load - capacity);
    }
};

class InvalidRoute : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Route {
    std::vector<int> customers;
    Load load = 0;
    Cost distance = 0;

    bool empty() const noexcept { return customers.empty(); }
    std::size_t size() const noexcept { return customers.size(); }
};

// Depot-anchored routes with cached load and distance per route. Empty routes
// are allowed while searching and dropped by normalize().
struct Solution {
    std::vector<Route> routes;

    static Solution from_routes(const Instance& inst, const std::vector<std::vector<int>>& routes);

    void refresh(const Instance& inst);
    void refresh_route(const Instance& inst, std::size_t r);
    void normalize();  // drops empty routes

    std::size_t nonempty_routes() const;
    std::vector<int> giant_tour() const;
    Cost total_distance() const;

    // Route set with each route in canonical orientation, routes sorted. Two
    // solutions are the same CVRP solution iff their canonical forms match.
    std::vector<std::vector<int>> canonical_routes() const;
};

Cost route_distance(const Instance& inst, std::span<const int> customers);
Load route_load(const Instance& inst, std::span<const int> customers);

// Throws InvalidRoute on duplicate or out-of-range customers.
Cost route_cost(const Instance& inst, std::span<const int> customers, const CostParams& params);

// Sum of cached route costs.
Cost solution_cost(const Instance& inst, const Solution& sol, const CostParams& params);

bool is_feasible(const Instance& inst, const Solution& sol);

struct ValidationReport {
    std::vector<int> missing;
    std::vector<int> duplicated;
    std::vector<int> unknown;
    std::vector<std::size_t> overloaded_routes;
    std::vector<std::string> cache_mismatches;

    bool ok() const {
        return missing.empty() && duplicated.empty() && unknown.empty() &&
               overloaded_routes.empty() && cache_mismatches.empty();
    }
    std::string describe() const;
};

ValidationReport validate(const Instance& inst, const Solution& sol);

// 100 (z - z_bks) / z_bks; throws std::domain_error when z_bks <= 0.
double gap_percent(Cost z, Cost z_bks);

}  // namespace pils
