#include "pils/injection.hpp"

#include <algorithm>

namespace pils {

namespace {

void collect_edges(const std::vector<std::vector<int>>& routes,
                   std::vector<std::pair<int, int>>& out) {
    out.clear();
    for (const auto& r : routes) {
        if (r.empty()) continue;
        int prev = 0;
        for (int c : r) {
            out.emplace_back(std::min(prev, c), std::max(prev, c));
            prev = c;
        }
        out.emplace_back(0, prev);
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

int replaced_edges(const std::vector<std::vector<int>>& before,
                   const std::vector<std::vector<int>>& after) {
    std::vector<std::pair<int, int>> a, b, diff;
    collect_edges(before, a);
    collect_edges(after, b);
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
    return static_cast<int>(diff.size());
}

PassStats pils_pass(const Instance& inst, Solution& sol, std::vector<Pattern> candidates,
                    const CostParams& params, std::mt19937_64& rng, const InjectionOptions& opts,
                    std::vector<MoveRecord>* log) {
    PassStats stats;
    stats.candidates = candidates.size();
    if (candidates.empty()) return stats;
    std::shuffle(candidates.begin(), candidates.end(), rng);

    SolutionIndex index(inst, sol);
    for (const auto& p : candidates) {
        if (index.contains(sol, p)) {
            ++stats.contained;
            continue;
        }
        const int touched = index.routes_touched(p);
        if (touched > opts.max_routes) {
            ++stats.too_spread;
            continue;
        }
        const FragmentSets sets = fragmentize(inst, sol, index, p);
        ++stats.reconnected;
        const ReconnectResult res = best_reconnect(sets, inst, params, opts.reconnect);
        if (!res.improved) continue;

        const Cost delta = res.best_cost - res.init_cost;
        if (log) {
            log->push_back(MoveRecord{p.length(), replaced_edges(sets.init, res.routes), touched,
                                      delta});
        }
        for (std::size_t k = 0; k < sets.init_routes.size(); ++k) {
            const int r = sets.init_routes[k];
            sol.routes[r].customers = res.routes[k];
            sol.refresh_route(inst, r);
            index.update_route(sol, r);
        }
        ++stats.applied;
        stats.delta += delta;
    }
    sol.normalize();
    return stats;
}

}  // namespace pils
