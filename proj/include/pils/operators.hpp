#pragma once

#include <random>
#include <vector>

#include "pils/local_search.hpp"

namespace pils {

// Optimal partition of a giant tour into contiguous capacity-feasible routes
// (shortest path on the auxiliary split graph).
Solution split(const Instance& inst, const std::vector<int>& tour);

// Order crossover. The child keeps p1[start..end] (0-based, inclusive) in
// place; the remaining positions, from end+1 onwards cyclically, receive the
// other customers in p2's cyclic order starting after `end`.
std::vector<int> ox_crossover(const std::vector<int>& p1, const std::vector<int>& p2, int start,
                              int end);
std::vector<int> ox_crossover(const std::vector<int>& p1, const std::vector<int>& p2,
                              std::mt19937_64& rng);

// Moves customers out of overloaded routes, one at a time, by the cheapest
// relocation into a route with enough spare capacity (or a new route).
Solution eject_overload(const Instance& inst, const Solution& sol);

// eject_overload followed by a forbidden-mode descent. Always feasible since
// every demand fits in an empty vehicle.
Solution repair(const Instance& inst, const Solution& sol, LocalSearch& ls, std::mt19937_64& rng);

// Nearest-neighbour routes; each route starts at a random unvisited customer.
Solution construct_initial(const Instance& inst, std::mt19937_64& rng);

}  // namespace pils
