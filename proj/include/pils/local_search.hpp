#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pils/solution.hpp"

namespace pils {

enum class MoveKind { Relocate, Swap, TwoOpt, TwoOptStar };

const char* to_string(MoveKind kind);

// Position-based move description. Positions index the customer vectors of the
// routes as they are before the move; -1 stands for the start depot.
//  Relocate:   customer at (route_a, pos_a) is inserted after position pos_b of route_b.
//  Swap:       customers at (route_a, pos_a) and (route_b, pos_b) trade places.
//  TwoOpt:     the segment [pos_a, pos_b] of route_a is reversed.
//  TwoOptStar: routes are cut after pos_a / pos_b. variant 0 exchanges tails,
//              variant 1 joins the heads (and the tails) back to back.
struct Move {
    MoveKind kind = MoveKind::Relocate;
    int route_a = 0;
    int pos_a = 0;
    int route_b = 0;
    int pos_b = 0;
    int variant = 0;
};

struct MoveDelta {
    Move move;
    Cost delta_cost = 0;  // under the active (possibly augmented) cost
    Cost true_delta = 0;  // under the true cost
};

// Guided local search edge penalties. The augmented cost of edge (i,j) is
// c_ij + weight * count(i,j).
class EdgePenalties {
  public:
    EdgePenalties(int vertex_count, Cost weight);

    int count(int i, int j) const { return counts_[index(i, j)]; }
    void increment(int i, int j);
    Cost weight() const noexcept { return weight_; }
    Cost augmented(const Instance& inst, int i, int j) const {
        return inst.distance(i, j) + weight_ * counts_[index(i, j)];
    }
    std::int64_t total() const noexcept { return total_; }

  private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(vertex_count_) +
               static_cast<std::size_t>(j);
    }
    int vertex_count_;
    Cost weight_;
    std::vector<int> counts_;
    std::int64_t total_ = 0;
};

// Increments the penalty of every edge of maximal utility c_ij / (1 + count_ij)
// in the solution (depot edges included). Returns the number of edges penalized.
std::size_t penalize_edges(const Instance& inst, const Solution& sol, EdgePenalties& penalties);

struct LsOptions {
    int granularity = 20;  // number of nearest neighbours per customer
};

enum class ScanPolicy { FirstImprovement, BestImprovement };

// Relocate / Swap / 2-opt / 2-opt* descent over granular neighbourhoods.
class LocalSearch {
  public:
    explicit LocalSearch(const Instance& inst, LsOptions opts = {});

    // Descends to a local minimum of the active cost; the returned solution
    // carries true (non-augmented) caches and has no empty routes.
    Solution descend(const Solution& sol, const CostParams& params, std::mt19937_64& rng,
                     const EdgePenalties* penalties = nullptr);

    // Lower-level interface over a loaded working copy.
    void load(const Solution& sol, const CostParams& params,
              const EdgePenalties* penalties = nullptr);
    Solution export_solution() const;
    Cost active_cost() const;

    bool is_valid(const Move& m) const;
    Cost evaluate(const Move& m) const;       // kInfeasible if forbidden
    Cost evaluate_true(const Move& m) const;  // same, without edge penalties
    void apply(const Move& m);

    std::optional<MoveDelta> scan(MoveKind kind, ScanPolicy policy, std::mt19937_64& rng);

    // Full descent on the loaded state; returns number of applied moves.
    std::size_t run(std::mt19937_64& rng);

    const std::vector<std::vector<int>>& routes() const { return routes_; }
    int empty_route() const;
    int granularity() const noexcept { return opts_.granularity; }

    // Active costs after every applied move of the last descent.
    void set_trace(bool on) { trace_on_ = on; }
    const std::vector<Cost>& trace() const { return trace_; }

  private:
    template <class EdgeCost>
    Cost delta_impl(const Move& m, EdgeCost&& ec) const;

    template <class Fn>
    void for_each_candidate(int u, int v, unsigned kinds, Fn&& fn) const;
    template <class Fn>
    void for_each_empty_candidate(int u, unsigned kinds, Fn&& fn) const;

    Cost edge(int i, int j) const {
        return penalties_ ? penalties_->augmented(inst_, i, j) : inst_.distance(i, j);
    }
    int at(int r, int pos) const {
        const auto& c = routes_[r];
        return (pos < 0 || pos >= static_cast<int>(c.size())) ? 0 : c[pos];
    }
    Cost route_cost(Load load, Cost dist) const { return params_.cost(load, dist, inst_.capacity()); }
    Cost penalty_delta(std::initializer_list<std::pair<Load, Load>> old_new) const;
    void refresh_route(int r);
    void ensure_empty_route();

    const Instance& inst_;
    LsOptions opts_;
    std::vector<std::vector<int>> neighbours_;

    CostParams params_;
    const EdgePenalties* penalties_ = nullptr;
    std::vector<std::vector<int>> routes_;
    std::vector<Load> loads_;
    std::vector<Cost> dists_;  // active edge costs
    std::vector<std::vector<Load>> prefix_;  // prefix_[r][k] = load of the first k customers
    std::vector<int> route_of_;
    std::vector<int> pos_of_;
    std::vector<int> order_;

    bool trace_on_ = false;
    std::vector<Cost> trace_;
};

}  // namespace pils
