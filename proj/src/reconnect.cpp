#include "pils/reconnect.hpp"

#include <algorithm>
#include <numeric>

namespace pils {

bool contains_pattern(const Solution& sol, const Pattern& p) {
    if (p.seq.empty()) return true;
    const auto l = p.seq.size();
    for (const auto& r : sol.routes) {
        const auto& c = r.customers;
        if (c.size() < l) continue;
        for (std::size_t s = 0; s + l <= c.size(); ++s) {
            if (std::equal(p.seq.begin(), p.seq.end(), c.begin() + s) ||
                std::equal(p.seq.rbegin(), p.seq.rend(), c.begin() + s))
                return true;
        }
    }
    return false;
}

SolutionIndex::SolutionIndex(const Instance& inst, const Solution& sol)
    : route_of(inst.vertex_count(), -1), pos_of(inst.vertex_count(), -1) {
    for (std::size_t r = 0; r < sol.routes.size(); ++r) update_route(sol, static_cast<int>(r));
}

void SolutionIndex::update_route(const Solution& sol, int r) {
    const auto& c = sol.routes[r].customers;
    for (std::size_t k = 0; k < c.size(); ++k) {
        route_of[c[k]] = r;
        pos_of[c[k]] = static_cast<int>(k);
    }
}

bool SolutionIndex::contains(const Solution& sol, const Pattern& p) const {
    const int v0 = p.seq.front();
    const int r = route_of[v0];
    if (r < 0) return false;
    const auto& c = sol.routes[r].customers;
    const int i = pos_of[v0];
    const int l = p.length();
    const int len = static_cast<int>(c.size());
    bool fwd = i + l <= len;
    for (int k = 1; fwd && k < l; ++k) fwd = c[i + k] == p.seq[k];
    if (fwd) return true;
    bool bwd = i - l + 1 >= 0;
    for (int k = 1; bwd && k < l; ++k) bwd = c[i - k] == p.seq[k];
    return bwd;
}

int SolutionIndex::routes_touched(const Pattern& p) const {
    int routes[16];
    int count = 0;
    for (int v : p.seq) {
        const int r = route_of[v];
        if (std::find(routes, routes + count, r) == routes + count) {
            if (count == 16) return count + 1;
            routes[count++] = r;
        }
    }
    return count;
}

FragmentSets fragmentize(const Instance& inst, const Solution& sol, const Pattern& p) {
    return fragmentize(inst, sol, SolutionIndex(inst, sol), p);
}

FragmentSets fragmentize(const Instance& inst, const Solution& sol, const SolutionIndex& index,
                         const Pattern& p) {
    FragmentSets sets;
    for (int v : p.seq) {
        const int r = index.route_of[v];
        if (r < 0) throw std::logic_error("pattern vertex " + std::to_string(v) + " not routed");
        sets.init_routes.push_back(r);
    }
    std::sort(sets.init_routes.begin(), sets.init_routes.end());
    sets.init_routes.erase(std::unique(sets.init_routes.begin(), sets.init_routes.end()),
                           sets.init_routes.end());

    auto in_pattern = [&p](int c) { return std::find(p.seq.begin(), p.seq.end(), c) != p.seq.end(); };
    for (int r : sets.init_routes) {
        const auto& c = sol.routes[r].customers;
        sets.init.push_back(c);
        std::vector<int> piece{0};  // the current piece starts at the depot
        bool first_piece = true;
        for (int v : c) {
            if (!in_pattern(v)) {
                piece.push_back(v);
                continue;
            }
            if (first_piece) {
                sets.beg.push_back(make_fragment(inst, std::move(piece), FragmentKind::Beg));
                first_piece = false;
            } else if (!piece.empty()) {
                sets.mid.push_back(make_fragment(inst, std::move(piece), FragmentKind::Mid));
            }
            piece.clear();
        }
        piece.push_back(0);
        sets.end.push_back(make_fragment(inst, std::move(piece), FragmentKind::End));
    }
    sets.pattern_index = static_cast<int>(sets.mid.size());
    sets.mid.push_back(make_fragment(inst, p.seq, FragmentKind::Mid));
    return sets;
}

Cost init_cost(const Instance& inst, const FragmentSets& sets, const CostParams& params) {
    Cost total = 0;
    for (const auto& r : sets.init) {
        const Cost c = params.cost(route_load(inst, r), route_distance(inst, r), inst.capacity());
        if (c >= kInfeasible) return kInfeasible;
        total += c;
    }
    return total;
}

namespace {

struct Piece {
    int first;
    int last;
    Load load;
    Cost dist;
    Cost cost;
};

struct Step {
    bool is_end;
    int index;
    bool reversed;
};

class Reconnector {
  public:
    Reconnector(const FragmentSets& sets, const Instance& inst, const CostParams& params,
                const ReconnectOptions& opts)
        : sets_(sets), inst_(inst), params_(params), opts_(opts) {
        auto summarize = [&](const Fragment& f) {
            return Piece{f.first(), f.last(), f.load, f.distance, cost(f.load, f.distance)};
        };
        for (const auto& f : sets.beg) begs_.push_back(summarize(f));
        for (const auto& f : sets.mid) mids_.push_back(summarize(f));
        for (const auto& f : sets.end) ends_.push_back(summarize(f));
        if (mids_.size() > 31 || ends_.size() > 31)
            throw std::length_error("too many fragments for reconnection");
    }

    ReconnectResult run() {
        ReconnectResult res;
        res.init_cost = init_cost(inst_, sets_, params_);
        best_ = res.init_cost;
        const std::size_t R = begs_.size();
        if (R == 0 || ends_.size() != R) {
            res.best_cost = best_;
            return res;
        }
        Cost total = 0;
        for (const auto* group : {&begs_, &mids_, &ends_})
            for (const auto& p : *group) total = add(total, p.cost);
        const auto& b0 = begs_[0];
        recurse(0, b0.last, b0.load, b0.dist, total);

        res.nodes = nodes_;
        res.best_cost = best_;
        if (!found_) return res;
        res.improved = true;
        res.routes.assign(R, {});
        std::size_t k = 0;
        auto append = [](std::vector<int>& out, const std::vector<int>& seq, bool reversed) {
            if (reversed)
                out.insert(out.end(), seq.rbegin(), seq.rend());
            else
                out.insert(out.end(), seq.begin(), seq.end());
        };
        std::vector<int> route(sets_.beg[0].seq.begin() + 1, sets_.beg[0].seq.end());
        for (const auto& s : best_path_) {
            if (!s.is_end) {
                append(route, sets_.mid[s.index].seq, s.reversed);
                continue;
            }
            const auto& e = sets_.end[s.index].seq;
            route.insert(route.end(), e.begin(), e.end() - 1);
            res.routes[k++] = std::move(route);
            route.clear();
            if (k < R) route.assign(sets_.beg[k].seq.begin() + 1, sets_.beg[k].seq.end());
        }
        return res;
    }

  private:
    Cost cost(Load load, Cost dist) const { return params_.cost(load, dist, inst_.capacity()); }
    static Cost add(Cost a, Cost b) { return (a >= kInfeasible || b >= kInfeasible) ? kInfeasible : a + b; }
    // Swaps two pieces of the bound for their concatenation. An infeasible
    // piece stays infeasible once extended, so an infinite bound stays infinite.
    static Cost replace(Cost total, Cost a, Cost b, Cost joined) {
        if (total >= kInfeasible) return kInfeasible;
        return add(total - a - b, joined);
    }

    bool over_capacity(Load load) const {
        return params_.mode == FeasibilityMode::Forbidden && load > inst_.capacity();
    }

    // Bound from scratch: rebuild every completed route and the open chain
    // from the recorded steps, add all untouched fragments.
    Cost recompute(std::size_t k) const {
        Cost total = 0;
        std::size_t route = 0;
        Load load = begs_[0].load;
        Cost dist = begs_[0].dist;
        int last = begs_[0].last;
        for (const auto& s : path_) {
            const Piece& p = s.is_end ? ends_[s.index] : mids_[s.index];
            const int first = s.reversed ? p.last : p.first;
            load += p.load;
            dist += inst_.distance(last, first) + p.dist;
            last = s.reversed ? p.first : p.last;
            if (s.is_end) {
                total = add(total, cost(load, dist));
                ++route;
                if (route < begs_.size()) {
                    load = begs_[route].load;
                    dist = begs_[route].dist;
                    last = begs_[route].last;
                }
            }
        }
        if (route != k) throw std::logic_error("reconnection bookkeeping: route counter mismatch");
        if (k < begs_.size()) total = add(total, cost(load, dist));
        for (std::size_t b = k + 1; b < begs_.size(); ++b) total = add(total, begs_[b].cost);
        for (std::size_t m = 0; m < mids_.size(); ++m)
            if (!(used_mid_ >> m & 1u)) total = add(total, mids_[m].cost);
        for (std::size_t e = 0; e < ends_.size(); ++e)
            if (!(used_end_ >> e & 1u)) total = add(total, ends_[e].cost);
        return total;
    }

    void recurse(std::size_t k, int last, Load load, Cost dist, Cost total) {
        ++nodes_;
        if (opts_.verify_bookkeeping && recompute(k) != total)
            throw std::logic_error("reconnection bookkeeping: incremental bound differs");
        if (opts_.prune && total >= best_) return;
        const std::size_t R = begs_.size();
        if (k == R) {
            if (total < best_) {
                best_ = total;
                best_path_ = path_;
                found_ = true;
            }
            return;
        }
        const Cost cur = cost(load, dist);
        const std::size_t mids_left = mids_.size() - static_cast<std::size_t>(std::popcount(used_mid_));

        for (std::size_t m = 0; m < mids_.size(); ++m) {
            if (used_mid_ >> m & 1u) continue;
            const Piece& p = mids_[m];
            const Load nl = load + p.load;
            if (over_capacity(nl)) continue;
            used_mid_ |= 1u << m;
            for (int rev = 0; rev < 2; ++rev) {
                if (rev && p.first == p.last) break;  // a single vertex reads the same both ways
                const int first = rev ? p.last : p.first;
                const Cost nd = dist + inst_.distance(last, first) + p.dist;
                const Cost nt = replace(total, cur, p.cost, cost(nl, nd));
                path_.push_back(Step{false, static_cast<int>(m), rev == 1});
                recurse(k, rev ? p.first : p.last, nl, nd, nt);
                path_.pop_back();
            }
            used_mid_ &= ~(1u << m);
        }

        if (R - k != 1 || mids_left == 0) {
            for (std::size_t e = 0; e < ends_.size(); ++e) {
                if (used_end_ >> e & 1u) continue;
                const Piece& p = ends_[e];
                const Load nl = load + p.load;
                if (over_capacity(nl)) continue;
                const Cost nd = dist + inst_.distance(last, p.first) + p.dist;
                const Cost nt = replace(total, cur, p.cost, cost(nl, nd));
                used_end_ |= 1u << e;
                path_.push_back(Step{true, static_cast<int>(e), false});
                if (k + 1 < R) {
                    const Piece& b = begs_[k + 1];
                    recurse(k + 1, b.last, b.load, b.dist, nt);
                } else {
                    recurse(k + 1, 0, 0, 0, nt);
                }
                path_.pop_back();
                used_end_ &= ~(1u << e);
            }
        }
    }

    const FragmentSets& sets_;
    const Instance& inst_;
    const CostParams& params_;
    ReconnectOptions opts_;
    std::vector<Piece> begs_, mids_, ends_;
    std::uint32_t used_mid_ = 0;
    std::uint32_t used_end_ = 0;
    std::vector<Step> path_;
    std::vector<Step> best_path_;
    Cost best_ = 0;
    bool found_ = false;
    std::uint64_t nodes_ = 0;
};

}  // namespace

ReconnectResult best_reconnect(const FragmentSets& sets, const Instance& inst,
                               const CostParams& params, const ReconnectOptions& opts) {
    return Reconnector(sets, inst, params, opts).run();
}

ReconnectResult brute_force_reconnect(const FragmentSets& sets, const Instance& inst,
                                      const CostParams& params) {
    const std::size_t R = sets.beg.size();
    const std::size_t M = sets.mid.size();
    if (R > 4 || sets.fragment_count() > 10)
        throw std::length_error("brute-force reconnection limited to 4 routes and 10 fragments");
    if (sets.end.size() != R) throw std::logic_error("beg/end fragment counts differ");

    ReconnectResult res;
    res.init_cost = init_cost(inst, sets, params);
    res.best_cost = res.init_cost;

    std::vector<int> end_perm(R);
    std::iota(end_perm.begin(), end_perm.end(), 0);
    std::vector<int> mid_perm(M);
    std::vector<std::size_t> cuts(R + 1, 0);  // route k takes mid_perm[cuts[k], cuts[k+1])
    std::vector<std::vector<int>> routes(R);

    auto evaluate = [&](unsigned orient) {
        Cost total = 0;
        for (std::size_t k = 0; k < R; ++k) {
            auto& route = routes[k];
            route.assign(sets.beg[k].seq.begin() + 1, sets.beg[k].seq.end());
            for (std::size_t pos = cuts[k]; pos < cuts[k + 1]; ++pos) {
                const auto& seq = sets.mid[mid_perm[pos]].seq;
                if (orient >> pos & 1u)
                    route.insert(route.end(), seq.rbegin(), seq.rend());
                else
                    route.insert(route.end(), seq.begin(), seq.end());
            }
            const auto& e = sets.end[end_perm[k]].seq;
            route.insert(route.end(), e.begin(), e.end() - 1);
            const Cost c = params.cost(route_load(inst, route), route_distance(inst, route),
                                       inst.capacity());
            if (c >= kInfeasible) return;
            total += c;
        }
        if (total < res.best_cost) {
            res.best_cost = total;
            res.routes = routes;
            res.improved = true;
        }
    };

    // Nondecreasing interior cut points.
    auto for_each_cut = [&](auto&& self, std::size_t idx, std::size_t lo, auto&& fn) -> void {
        if (idx == R) {
            fn();
            return;
        }
        for (std::size_t c = lo; c <= M; ++c) {
            cuts[idx] = c;
            self(self, idx + 1, c, fn);
        }
    };

    do {
        std::iota(mid_perm.begin(), mid_perm.end(), 0);
        do {
            for (unsigned orient = 0; orient < (1u << M); ++orient) {
                ++res.nodes;
                cuts[0] = 0;
                cuts[R] = M;
                for_each_cut(for_each_cut, 1, 0, [&] { evaluate(orient); });
            }
        } while (std::next_permutation(mid_perm.begin(), mid_perm.end()));
    } while (std::next_permutation(end_perm.begin(), end_perm.end()));
    return res;
}

}  // namespace pils
