#pragma once

#include <cstdint>
#include <vector>

#include "pils/fragment.hpp"
#include "pils/pattern_pool.hpp"

namespace pils {

// Fragments obtained by cutting the routes touched by a pattern. beg[k] and
// end[k] come from the k-th touched route; the pattern itself is mid[pattern_index].
struct FragmentSets {
    std::vector<Fragment> beg;
    std::vector<Fragment> mid;
    std::vector<Fragment> end;
    std::vector<int> init_routes;               // indices of the touched routes
    std::vector<std::vector<int>> init;         // their customer sequences
    int pattern_index = -1;

    std::size_t fragment_count() const { return beg.size() + mid.size() + end.size(); }
};

// True iff the pattern or its mirror is a contiguous piece of some route.
bool contains_pattern(const Solution& sol, const Pattern& p);

// Position of every customer in a solution (route index, index in route).
struct SolutionIndex {
    std::vector<int> route_of;
    std::vector<int> pos_of;

    SolutionIndex(const Instance& inst, const Solution& sol);
    void update_route(const Solution& sol, int r);
    bool contains(const Solution& sol, const Pattern& p) const;
    int routes_touched(const Pattern& p) const;
};

// Removes every edge incident to a pattern vertex in the touched routes and
// adds the pattern's own edges as one mid fragment.
FragmentSets fragmentize(const Instance& inst, const Solution& sol, const Pattern& p);
FragmentSets fragmentize(const Instance& inst, const Solution& sol, const SolutionIndex& index,
                         const Pattern& p);

struct ReconnectOptions {
    bool prune = true;
    bool verify_bookkeeping = false;  // recompute the pruning bound from scratch at every node
};

struct ReconnectResult {
    bool improved = false;
    Cost init_cost = 0;
    Cost best_cost = 0;                    // == init_cost when not improved
    std::vector<std::vector<int>> routes;  // one per touched route, depot stripped
    std::uint64_t nodes = 0;
};

Cost init_cost(const Instance& inst, const FragmentSets& sets, const CostParams& params);

// Minimum-cost reconnection of the fragments into |init| depot-to-depot routes.
// Mid fragments may be reversed; the first beg fragment is always extended until
// it is closed by an end fragment; the last route may only close once every mid
// fragment is used. Only strict improvements over the touched routes count.
ReconnectResult best_reconnect(const FragmentSets& sets, const Instance& inst,
                               const CostParams& params, const ReconnectOptions& opts = {});

// Exhaustive enumeration for small sets (<= 4 routes, <= 10 fragments); throws
// std::length_error beyond that.
ReconnectResult brute_force_reconnect(const FragmentSets& sets, const Instance& inst,
                                      const CostParams& params);

}  // namespace pils
