#include "pils/operators.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pils/fragment.hpp"

namespace pils {

namespace {

void check_permutation(const std::vector<int>& tour, std::size_t n) {
    if (tour.size() != n) throw ContractViolation("giant tour has the wrong length");
    std::vector<char> seen(n + 1, 0);
    for (int c : tour) {
        if (c < 1 || static_cast<std::size_t>(c) > n || seen[c])
            throw ContractViolation("giant tour is not a permutation of the customers");
        seen[c] = 1;
    }
}

}  // namespace

Solution split(const Instance& inst, const std::vector<int>& tour) {
    const int n = static_cast<int>(tour.size());
    check_permutation(tour, static_cast<std::size_t>(inst.n()));
    const Cost inf = std::numeric_limits<Cost>::max();
    std::vector<Cost> best(n + 1, inf);
    std::vector<int> pred(n + 1, -1);
    best[0] = 0;
    for (int i = 0; i < n; ++i) {
        if (best[i] == inf) continue;
        Load load = 0;
        Cost dist = 0;
        for (int j = i; j < n; ++j) {
            load += inst.demand(tour[j]);
            if (load > inst.capacity()) break;
            dist += j == i ? inst.distance(0, tour[j]) : inst.distance(tour[j - 1], tour[j]);
            const Cost c = best[i] + dist + inst.distance(tour[j], 0);
            if (c < best[j + 1]) {
                best[j + 1] = c;
                pred[j + 1] = i;
            }
        }
    }
    std::vector<std::vector<int>> routes;
    for (int j = n; j > 0; j = pred[j]) routes.emplace_back(tour.begin() + pred[j], tour.begin() + j);
    std::reverse(routes.begin(), routes.end());
    return Solution::from_routes(inst, routes);
}

std::vector<int> ox_crossover(const std::vector<int>& p1, const std::vector<int>& p2, int start,
                              int end) {
    const int n = static_cast<int>(p1.size());
    check_permutation(p1, p1.size());
    check_permutation(p2, p1.size());
    if (n == 0) return {};
    if (start < 0 || end >= n || start > end) throw ContractViolation("invalid crossover cut");
    std::vector<int> child(n, 0);
    std::vector<char> taken(n + 1, 0);
    for (int k = start; k <= end; ++k) {
        child[k] = p1[k];
        taken[p1[k]] = 1;
    }
    int pos = (end + 1) % n;
    for (int k = 0; k < n; ++k) {
        const int c = p2[(end + 1 + k) % n];
        if (taken[c]) continue;
        child[pos] = c;
        pos = (pos + 1) % n;
    }
    return child;
}

std::vector<int> ox_crossover(const std::vector<int>& p1, const std::vector<int>& p2,
                              std::mt19937_64& rng) {
    const int n = static_cast<int>(p1.size());
    if (n == 0) return {};
    std::uniform_int_distribution<int> pick(0, n - 1);
    int a = pick(rng), b = pick(rng);
    if (a > b) std::swap(a, b);
    return ox_crossover(p1, p2, a, b);
}

Solution eject_overload(const Instance& inst, const Solution& sol) {
    std::vector<std::vector<int>> routes;
    std::vector<Load> loads;
    for (const auto& r : sol.routes) {
        if (r.empty()) continue;
        routes.push_back(r.customers);
        loads.push_back(route_load(inst, r.customers));
    }
    const Load cap = inst.capacity();
    auto at = [&](const std::vector<int>& r, int k) {
        return (k < 0 || k >= static_cast<int>(r.size())) ? 0 : r[k];
    };
    for (std::size_t a = 0; a < routes.size(); ++a) {
        while (loads[a] > cap) {
            Cost best = std::numeric_limits<Cost>::max();
            int best_i = -1, best_b = -1, best_pos = -1;
            const auto& ra = routes[a];
            for (int i = 0; i < static_cast<int>(ra.size()); ++i) {
                const int u = ra[i];
                const int p = at(ra, i - 1), nx = at(ra, i + 1);
                const Cost removal = inst.distance(p, nx) - inst.distance(p, u) - inst.distance(u, nx);
                // a new route
                const Cost fresh = removal + 2 * inst.distance(0, u);
                if (fresh < best) {
                    best = fresh;
                    best_i = i;
                    best_b = -1;
                    best_pos = 0;
                }
                for (std::size_t b = 0; b < routes.size(); ++b) {
                    if (b == a || loads[b] + inst.demand(u) > cap) continue;
                    const auto& rb = routes[b];
                    for (int k = 0; k <= static_cast<int>(rb.size()); ++k) {
                        const int x = at(rb, k - 1), y = at(rb, k);
                        const Cost d = removal + inst.distance(x, u) + inst.distance(u, y) -
                                       inst.distance(x, y);
                        if (d < best) {
                            best = d;
                            best_i = i;
                            best_b = static_cast<int>(b);
                            best_pos = k;
                        }
                    }
                }
            }
            const int u = routes[a][best_i];
            routes[a].erase(routes[a].begin() + best_i);
            loads[a] -= inst.demand(u);
            if (best_b < 0) {
                routes.push_back({u});
                loads.push_back(inst.demand(u));
            } else {
                routes[best_b].insert(routes[best_b].begin() + best_pos, u);
                loads[best_b] += inst.demand(u);
            }
        }
    }
    return Solution::from_routes(inst, routes);
}

Solution repair(const Instance& inst, const Solution& sol, LocalSearch& ls, std::mt19937_64& rng) {
    if (is_feasible(inst, sol)) return sol;
    const Solution fixed = eject_overload(inst, sol);
    return ls.descend(fixed, CostParams::defaults_for(inst, FeasibilityMode::Forbidden), rng);
}

Solution construct_initial(const Instance& inst, std::mt19937_64& rng) {
    const int n = inst.n();
    std::vector<int> unvisited(n);
    std::iota(unvisited.begin(), unvisited.end(), 1);
    std::vector<std::vector<int>> routes;
    while (!unvisited.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, unvisited.size() - 1);
        std::size_t k = pick(rng);
        std::vector<int> route;
        Load load = 0;
        while (true) {
            const int c = unvisited[k];
            route.push_back(c);
            load += inst.demand(c);
            unvisited[k] = unvisited.back();
            unvisited.pop_back();
            Cost best = std::numeric_limits<Cost>::max();
            std::size_t next = unvisited.size();
            for (std::size_t j = 0; j < unvisited.size(); ++j) {
                const int v = unvisited[j];
                if (load + inst.demand(v) > inst.capacity()) continue;
                const Cost d = inst.distance(c, v);
                if (d < best || (d == best && v < unvisited[next])) {
                    best = d;
                    next = j;
                }
            }
            if (next == unvisited.size()) break;
            k = next;
        }
        routes.push_back(std::move(route));
    }
    return Solution::from_routes(inst, routes);
}

}  // namespace pils
