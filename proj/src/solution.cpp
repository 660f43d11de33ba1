#include "pils/solution.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace pils {

CostParams CostParams::defaults_for(const Instance& inst, FeasibilityMode mode) {
    CostParams p;
    p.penalty_per_unit = 1 + inst.max_edge() / inst.capacity();
    p.mode = mode;
    return p;
}

Cost route_distance(const Instance& inst, std::span<const int> customers) {
    if (customers.empty()) return 0;
    Cost d = inst.distance(0, customers.front());
    for (std::size_t i = 1; i < customers.size(); ++i)
        d += inst.distance(customers[i - 1], customers[i]);
    return d + inst.distance(customers.back(), 0);
}

Load route_load(const Instance& inst, std::span<const int> customers) {
    Load q = 0;
    for (int c : customers) q += inst.demand(c);
    return q;
}

Cost route_cost(const Instance& inst, std::span<const int> customers, const CostParams& params) {
    std::vector<char> seen(inst.vertex_count(), 0);
    for (int c : customers) {
        if (c < 1 || c > inst.n())
            throw InvalidRoute("customer id " + std::to_string(c) + " out of range");
        if (seen[c]) throw InvalidRoute("customer " + std::to_string(c) + " repeated in route");
        seen[c] = 1;
    }
    return params.cost(route_load(inst, customers), route_distance(inst, customers),
                       inst.capacity());
}

Solution Solution::from_routes(const Instance& inst, const std::vector<std::vector<int>>& routes) {
    Solution s;
    s.routes.reserve(routes.size());
    for (const auto& r : routes) s.routes.push_back(Route{r, 0, 0});
    s.refresh(inst);
    return s;
}

void Solution::refresh(const Instance& inst) {
    for (std::size_t r = 0; r < routes.size(); ++r) refresh_route(inst, r);
}

void Solution::refresh_route(const Instance& inst, std::size_t r) {
    routes[r].load = route_load(inst, routes[r].customers);
    routes[r].distance = route_distance(inst, routes[r].customers);
}

void Solution::normalize() {
    std::erase_if(routes, [](const Route& r) { return r.empty(); });
}

std::size_t Solution::nonempty_routes() const {
    return static_cast<std::size_t>(
        std::count_if(routes.begin(), routes.end(), [](const Route& r) { return !r.empty(); }));
}

std::vector<int> Solution::giant_tour() const {
    std::vector<int> tour;
    for (const auto& r : routes) tour.insert(tour.end(), r.customers.begin(), r.customers.end());
    return tour;
}

Cost Solution::total_distance() const {
    Cost d = 0;
    for (const auto& r : routes) d += r.distance;
    return d;
}

std::vector<std::vector<int>> Solution::canonical_routes() const {
    std::vector<std::vector<int>> out;
    for (const auto& r : routes) {
        if (r.empty()) continue;
        std::vector<int> fwd = r.customers;
        std::vector<int> rev(fwd.rbegin(), fwd.rend());
        out.push_back(std::min(fwd, rev));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Cost solution_cost(const Instance& inst, const Solution& sol, const CostParams& params) {
    Cost total = 0;
    for (const auto& r : sol.routes) {
        const Cost c = params.cost(r.load, r.distance, inst.capacity());
        if (c >= kInfeasible) return kInfeasible;
        total += c;
    }
    return total;
}

bool is_feasible(const Instance& inst, const Solution& sol) {
    return std::all_of(sol.routes.begin(), sol.routes.end(),
                       [&](const Route& r) { return r.load <= inst.capacity(); });
}

std::string ValidationReport::describe() const {
    std::ostringstream os;
    auto list = [&os](const char* label, const auto& items) {
        if (items.empty()) return;
        os << label << ":";
        for (const auto& x : items) os << ' ' << x;
        os << '\n';
    };
    list("missing customers", missing);
    list("duplicated customers", duplicated);
    list("unknown customer ids", unknown);
    list("overloaded routes", overloaded_routes);
    for (const auto& m : cache_mismatches) os << "cache mismatch: " << m << '\n';
    return os.str();
}

ValidationReport validate(const Instance& inst, const Solution& sol) {
    ValidationReport rep;
    std::vector<int> visits(inst.vertex_count(), 0);
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const auto& route = sol.routes[r];
        Load load = 0;
        bool route_ids_ok = true;
        for (int c : route.customers) {
            if (c < 1 || c > inst.n()) {
                rep.unknown.push_back(c);
                route_ids_ok = false;
                continue;
            }
            if (++visits[c] == 2) rep.duplicated.push_back(c);
            load += inst.demand(c);
        }
        if (!route_ids_ok) continue;
        if (load > inst.capacity()) rep.overloaded_routes.push_back(r);
        if (load != route.load) {
            rep.cache_mismatches.push_back("route " + std::to_string(r) + " load cached " +
                                           std::to_string(route.load) + " actual " +
                                           std::to_string(load));
        }
        const Cost d = route_distance(inst, route.customers);
        if (d != route.distance) {
            rep.cache_mismatches.push_back("route " + std::to_string(r) + " distance cached " +
                                           std::to_string(route.distance) + " actual " +
                                           std::to_string(d));
        }
    }
    for (int c = 1; c <= inst.n(); ++c)
        if (visits[c] == 0) rep.missing.push_back(c);
    return rep;
}

double gap_percent(Cost z, Cost z_bks) {
    if (z_bks <= 0) throw std::domain_error("BKS value must be positive");
    return 100.0 * static_cast<double>(z - z_bks) / static_cast<double>(z_bks);
}

}  // namespace pils
