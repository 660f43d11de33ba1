#include "pils/local_search.hpp"

#include <algorithm>
#include <numeric>

namespace pils {

namespace {

constexpr unsigned bit(MoveKind k) { return 1u << static_cast<unsigned>(k); }
constexpr unsigned kAllKinds = bit(MoveKind::Relocate) | bit(MoveKind::Swap) |
                               bit(MoveKind::TwoOpt) | bit(MoveKind::TwoOptStar);

}  // namespace

const char* to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::Relocate:
            return "relocate";
        case MoveKind::Swap:
            return "swap";
        case MoveKind::TwoOpt:
            return "2opt";
        case MoveKind::TwoOptStar:
            return "2opt*";
    }
    return "?";
}

EdgePenalties::EdgePenalties(int vertex_count, Cost weight)
    : vertex_count_(vertex_count),
      weight_(weight),
      counts_(static_cast<std::size_t>(vertex_count) * static_cast<std::size_t>(vertex_count), 0) {}

void EdgePenalties::increment(int i, int j) {
    ++counts_[index(i, j)];
    if (i != j) ++counts_[index(j, i)];
    ++total_;
}

std::size_t penalize_edges(const Instance& inst, const Solution& sol, EdgePenalties& penalties) {
    // Utilities c / (1 + count) are compared exactly by cross-multiplication.
    std::vector<std::pair<int, int>> best_edges;
    Cost best_c = -1;
    Cost best_den = 1;
    auto consider = [&](int i, int j) {
        const Cost c = inst.distance(i, j);
        const Cost den = 1 + penalties.count(i, j);
        if (best_c < 0 || c * best_den > best_c * den) {
            best_c = c;
            best_den = den;
            best_edges.clear();
            best_edges.emplace_back(std::min(i, j), std::max(i, j));
        } else if (c * best_den == best_c * den) {
            best_edges.emplace_back(std::min(i, j), std::max(i, j));
        }
    };
    for (const auto& r : sol.routes) {
        if (r.empty()) continue;
        int prev = 0;
        for (int c : r.customers) {
            consider(prev, c);
            prev = c;
        }
        consider(prev, 0);
    }
    // An edge used twice (depot round trip) is penalized once.
    std::sort(best_edges.begin(), best_edges.end());
    best_edges.erase(std::unique(best_edges.begin(), best_edges.end()), best_edges.end());
    for (auto [i, j] : best_edges) penalties.increment(i, j);
    return best_edges.size();
}

LocalSearch::LocalSearch(const Instance& inst, LsOptions opts) : inst_(inst), opts_(opts) {
    const int n = inst.n();
    const int k = std::clamp(opts_.granularity, 1, std::max(1, n - 1));
    neighbours_.assign(n + 1, {});
    std::vector<int> others;
    for (int u = 1; u <= n; ++u) {
        others.clear();
        for (int v = 1; v <= n; ++v)
            if (v != u) others.push_back(v);
        const auto kk = std::min<std::size_t>(k, others.size());
        std::partial_sort(others.begin(), others.begin() + kk, others.end(), [&](int a, int b) {
            const Cost da = inst.distance(u, a), db = inst.distance(u, b);
            return da != db ? da < db : a < b;
        });
        neighbours_[u].assign(others.begin(), others.begin() + kk);
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 1);
    route_of_.assign(n + 1, -1);
    pos_of_.assign(n + 1, -1);
}

void LocalSearch::load(const Solution& sol, const CostParams& params,
                       const EdgePenalties* penalties) {
    params_ = params;
    penalties_ = penalties;
    routes_.clear();
    for (const auto& r : sol.routes) routes_.push_back(r.customers);
    loads_.assign(routes_.size(), 0);
    dists_.assign(routes_.size(), 0);
    prefix_.assign(routes_.size(), {});
    for (int r = 0; r < static_cast<int>(routes_.size()); ++r) refresh_route(r);
    ensure_empty_route();
    trace_.clear();
}

Solution LocalSearch::export_solution() const {
    std::vector<std::vector<int>> nonempty;
    for (const auto& r : routes_)
        if (!r.empty()) nonempty.push_back(r);
    return Solution::from_routes(inst_, nonempty);
}

Cost LocalSearch::active_cost() const {
    Cost total = 0;
    for (std::size_t r = 0; r < routes_.size(); ++r) {
        const Cost c = route_cost(loads_[r], dists_[r]);
        if (c >= kInfeasible) return kInfeasible;
        total += c;
    }
    return total;
}

int LocalSearch::empty_route() const {
    for (std::size_t r = 0; r < routes_.size(); ++r)
        if (routes_[r].empty()) return static_cast<int>(r);
    return -1;
}

void LocalSearch::ensure_empty_route() {
    if (empty_route() >= 0) return;
    routes_.emplace_back();
    loads_.push_back(0);
    dists_.push_back(0);
    prefix_.push_back({0});
}

void LocalSearch::refresh_route(int r) {
    const auto& c = routes_[r];
    auto& pre = prefix_[r];
    pre.assign(c.size() + 1, 0);
    Cost d = 0;
    int prev = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        pre[k + 1] = pre[k] + inst_.demand(c[k]);
        d += edge(prev, c[k]);
        prev = c[k];
        route_of_[c[k]] = r;
        pos_of_[c[k]] = static_cast<int>(k);
    }
    if (!c.empty()) d += edge(prev, 0);
    loads_[r] = pre.back();
    dists_[r] = d;
}

Cost LocalSearch::penalty_delta(std::initializer_list<std::pair<Load, Load>> old_new) const {
    const Load cap = inst_.capacity();
    Cost delta = 0;
    for (auto [before, after] : old_new) {
        if (params_.mode == FeasibilityMode::Forbidden) {
            if (after > cap) return kInfeasible;
            continue;
        }
        delta += params_.penalty_per_unit * (std::max<Load>(0, after - cap) -
                                             std::max<Load>(0, before - cap));
    }
    return delta;
}

bool LocalSearch::is_valid(const Move& m) const {
    const int nr = static_cast<int>(routes_.size());
    auto route_ok = [nr](int r) { return r >= 0 && r < nr; };
    if (!route_ok(m.route_a) || !route_ok(m.route_b)) return false;
    const int la = static_cast<int>(routes_[m.route_a].size());
    const int lb = static_cast<int>(routes_[m.route_b].size());
    switch (m.kind) {
        case MoveKind::Relocate:
            if (m.pos_a < 0 || m.pos_a >= la || m.pos_b < -1 || m.pos_b >= lb) return false;
            if (m.route_a == m.route_b && (m.pos_b == m.pos_a || m.pos_b == m.pos_a - 1))
                return false;
            return true;
        case MoveKind::Swap:
            if (m.pos_a < 0 || m.pos_a >= la || m.pos_b < 0 || m.pos_b >= lb) return false;
            return !(m.route_a == m.route_b && m.pos_a == m.pos_b);
        case MoveKind::TwoOpt:
            return m.route_a == m.route_b && m.pos_a >= 0 && m.pos_a < m.pos_b && m.pos_b < la;
        case MoveKind::TwoOptStar:
            return m.route_a != m.route_b && m.pos_a >= -1 && m.pos_a < la && m.pos_b >= -1 &&
                   m.pos_b < lb && (m.variant == 0 || m.variant == 1);
    }
    return false;
}

template <class EdgeCost>
Cost LocalSearch::delta_impl(const Move& m, EdgeCost&& ec) const {
    const int A = m.route_a, B = m.route_b;
    switch (m.kind) {
        case MoveKind::Relocate: {
            const int i = m.pos_a, j = m.pos_b;
            const int u = routes_[A][i];
            const int p = at(A, i - 1), nx = at(A, i + 1);
            const int b = at(B, j), c = at(B, j + 1);
            const Cost d = ec(p, nx) - ec(p, u) - ec(u, nx) + ec(b, u) + ec(u, c) - ec(b, c);
            if (A == B) return d;
            const Load q = inst_.demand(u);
            const Cost pen = penalty_delta({{loads_[A], loads_[A] - q}, {loads_[B], loads_[B] + q}});
            return pen >= kInfeasible ? kInfeasible : d + pen;
        }
        case MoveKind::Swap: {
            int i = m.pos_a, j = m.pos_b;
            if (A == B) {
                if (i > j) std::swap(i, j);
                const int u = routes_[A][i], v = routes_[A][j];
                if (j == i + 1) {
                    const int p = at(A, i - 1), nx = at(A, j + 1);
                    return ec(p, v) + ec(u, nx) - ec(p, u) - ec(v, nx);
                }
                const int pu = at(A, i - 1), nu = at(A, i + 1), pv = at(A, j - 1), nv = at(A, j + 1);
                return ec(pu, v) + ec(v, nu) + ec(pv, u) + ec(u, nv) - ec(pu, u) - ec(u, nu) -
                       ec(pv, v) - ec(v, nv);
            }
            const int u = routes_[A][i], v = routes_[B][j];
            const int pu = at(A, i - 1), nu = at(A, i + 1), pv = at(B, j - 1), nv = at(B, j + 1);
            const Cost d = ec(pu, v) + ec(v, nu) + ec(pv, u) + ec(u, nv) - ec(pu, u) - ec(u, nu) -
                           ec(pv, v) - ec(v, nv);
            const Load qu = inst_.demand(u), qv = inst_.demand(v);
            const Cost pen = penalty_delta(
                {{loads_[A], loads_[A] - qu + qv}, {loads_[B], loads_[B] - qv + qu}});
            return pen >= kInfeasible ? kInfeasible : d + pen;
        }
        case MoveKind::TwoOpt: {
            const int a = m.pos_a, b = m.pos_b;
            const int p = at(A, a - 1), nx = at(A, b + 1);
            const int xa = routes_[A][a], xb = routes_[A][b];
            return ec(p, xb) + ec(xa, nx) - ec(p, xa) - ec(xb, nx);
        }
        case MoveKind::TwoOptStar: {
            const int i = m.pos_a, j = m.pos_b;
            const int x1 = at(A, i), x2 = at(A, i + 1), y1 = at(B, j), y2 = at(B, j + 1);
            const Load head_a = prefix_[A][i + 1], head_b = prefix_[B][j + 1];
            const Load tail_a = loads_[A] - head_a, tail_b = loads_[B] - head_b;
            Cost d;
            Load new_a, new_b;
            if (m.variant == 0) {
                d = ec(x1, y2) + ec(y1, x2);
                new_a = head_a + tail_b;
                new_b = head_b + tail_a;
            } else {
                d = ec(x1, y1) + ec(x2, y2);
                new_a = head_a + head_b;
                new_b = tail_a + tail_b;
            }
            d -= ec(x1, x2) + ec(y1, y2);
            const Cost pen = penalty_delta({{loads_[A], new_a}, {loads_[B], new_b}});
            return pen >= kInfeasible ? kInfeasible : d + pen;
        }
    }
    return 0;
}

Cost LocalSearch::evaluate(const Move& m) const {
    return delta_impl(m, [this](int i, int j) { return edge(i, j); });
}

Cost LocalSearch::evaluate_true(const Move& m) const {
    return delta_impl(m, [this](int i, int j) { return inst_.distance(i, j); });
}

void LocalSearch::apply(const Move& m) {
    const int A = m.route_a, B = m.route_b;
    switch (m.kind) {
        case MoveKind::Relocate: {
            auto& ra = routes_[A];
            const int u = ra[m.pos_a];
            ra.erase(ra.begin() + m.pos_a);
            auto& rb = routes_[B];
            const int at_index = (A == B && m.pos_b > m.pos_a) ? m.pos_b : m.pos_b + 1;
            rb.insert(rb.begin() + at_index, u);
            break;
        }
        case MoveKind::Swap:
            std::swap(routes_[A][m.pos_a], routes_[B][m.pos_b]);
            break;
        case MoveKind::TwoOpt:
            std::reverse(routes_[A].begin() + m.pos_a, routes_[A].begin() + m.pos_b + 1);
            break;
        case MoveKind::TwoOptStar: {
            const auto& ra = routes_[A];
            const auto& rb = routes_[B];
            const auto a_cut = ra.begin() + (m.pos_a + 1);
            const auto b_cut = rb.begin() + (m.pos_b + 1);
            std::vector<int> na(ra.begin(), a_cut);
            std::vector<int> nb;
            if (m.variant == 0) {
                na.insert(na.end(), b_cut, rb.end());
                nb.assign(rb.begin(), b_cut);
                nb.insert(nb.end(), a_cut, ra.end());
            } else {
                na.insert(na.end(), std::make_reverse_iterator(b_cut), rb.rend());
                nb.assign(ra.rbegin(), std::make_reverse_iterator(a_cut));
                nb.insert(nb.end(), b_cut, rb.end());
            }
            routes_[A] = std::move(na);
            routes_[B] = std::move(nb);
            break;
        }
    }
    refresh_route(A);
    if (B != A) refresh_route(B);
    ensure_empty_route();
    if (trace_on_) trace_.push_back(active_cost());
}

template <class Fn>
void LocalSearch::for_each_candidate(int u, int v, unsigned kinds, Fn&& fn) const {
    const int ru = route_of_[u], rv = route_of_[v];
    const int i = pos_of_[u], j = pos_of_[v];
    if (kinds & bit(MoveKind::Relocate)) {
        // u after v, u before v
        if (!(ru == rv && j == i - 1))
            if (fn(Move{MoveKind::Relocate, ru, i, rv, j, 0})) return;
        if (!(ru == rv && (j - 1 == i || j - 1 == i - 1)))
            if (fn(Move{MoveKind::Relocate, ru, i, rv, j - 1, 0})) return;
    }
    if (kinds & bit(MoveKind::Swap)) {
        if (fn(Move{MoveKind::Swap, ru, i, rv, j, 0})) return;
    }
    if (ru == rv) {
        if (kinds & bit(MoveKind::TwoOpt)) {
            // Reversals creating the edge (u, v).
            if (i + 1 < j && fn(Move{MoveKind::TwoOpt, ru, i + 1, ru, j, 0})) return;
            if (j + 1 < i && fn(Move{MoveKind::TwoOpt, ru, j + 1, ru, i, 0})) return;
            if (i < j - 1 && fn(Move{MoveKind::TwoOpt, ru, i, ru, j - 1, 0})) return;
            if (j < i - 1 && fn(Move{MoveKind::TwoOpt, ru, j, ru, i - 1, 0})) return;
        }
    } else if (kinds & bit(MoveKind::TwoOptStar)) {
        if (fn(Move{MoveKind::TwoOptStar, ru, i, rv, j - 1, 0})) return;
        if (fn(Move{MoveKind::TwoOptStar, ru, i - 1, rv, j, 0})) return;
        if (fn(Move{MoveKind::TwoOptStar, ru, i, rv, j, 1})) return;
        if (fn(Move{MoveKind::TwoOptStar, ru, i - 1, rv, j - 1, 1})) return;
    }
}

template <class Fn>
void LocalSearch::for_each_empty_candidate(int u, unsigned kinds, Fn&& fn) const {
    const int e = empty_route();
    if (e < 0) return;
    const int ru = route_of_[u], i = pos_of_[u];
    if (kinds & bit(MoveKind::Relocate)) {
        if (fn(Move{MoveKind::Relocate, ru, i, e, -1, 0})) return;
    }
    if ((kinds & bit(MoveKind::TwoOptStar)) && i > 0) {
        // Split the route before u, the tail becomes a route of its own.
        if (fn(Move{MoveKind::TwoOptStar, e, -1, ru, i - 1, 0})) return;
    }
}

std::size_t LocalSearch::run(std::mt19937_64& rng) {
    std::size_t applied = 0;
    bool improved = true;
    while (improved) {
        improved = false;
        std::shuffle(order_.begin(), order_.end(), rng);
        for (int u : order_) {
            auto try_move = [&](const Move& m) {
                if (evaluate(m) < 0) {
                    apply(m);
                    ++applied;
                    improved = true;
                    return true;
                }
                return false;
            };
            for (int v : neighbours_[u]) for_each_candidate(u, v, kAllKinds, try_move);
            for_each_empty_candidate(u, kAllKinds, try_move);
        }
    }
    return applied;
}

Solution LocalSearch::descend(const Solution& sol, const CostParams& params, std::mt19937_64& rng,
                              const EdgePenalties* penalties) {
    load(sol, params, penalties);
    run(rng);
    return export_solution();
}

std::optional<MoveDelta> LocalSearch::scan(MoveKind kind, ScanPolicy policy,
                                           std::mt19937_64& rng) {
    std::optional<MoveDelta> best;
    std::shuffle(order_.begin(), order_.end(), rng);
    bool stop = false;
    auto consider = [&](const Move& m) {
        const Cost d = evaluate(m);
        if (d < 0 && (!best || d < best->delta_cost)) {
            best = MoveDelta{m, d, evaluate_true(m)};
            if (policy == ScanPolicy::FirstImprovement) stop = true;
        }
        return stop;
    };
    for (int u : order_) {
        for (int v : neighbours_[u]) {
            for_each_candidate(u, v, bit(kind), consider);
            if (stop) return best;
        }
        for_each_empty_candidate(u, bit(kind), consider);
        if (stop) return best;
    }
    return best;
}

}  // namespace pils
