#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pils/solution.hpp"

namespace pils {

// A contiguous customer sequence, stored in the orientation that is
// lexicographically smaller than its mirror.
struct Pattern {
    std::vector<int> seq;

    int length() const noexcept { return static_cast<int>(seq.size()); }
    friend bool operator==(const Pattern&, const Pattern&) = default;
    friend auto operator<=>(const Pattern&, const Pattern&) = default;
};

struct PatternHash {
    std::size_t operator()(const Pattern& p) const noexcept;
};

class InvalidPattern : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct PoolParams {
    int l_min = 3;
    int l_max = 5;
    int phi_freq = 500;  // patterns tracked per length
};

// Throws InvalidPattern on depot, repeated customer or length outside [l_min, l_max].
Pattern canonicalize(std::span<const int> raw, int l_min, int l_max);

struct PatternEntry {
    Pattern pattern;
    std::int64_t frequency = 0;
    std::int64_t stamp = 0;     // clock value when the current frequency was reached
    Cost best_cost = kInfeasible;  // cheapest solution the pattern was extracted from
    int heap_pos = -1;
};

// Frequency map over all extracted patterns plus, per length, a min-heap of the
// phi_freq most frequent ones. Ranking: higher frequency first, then the entry
// that reached its frequency earlier. A pattern outside a full heap enters only
// with a frequency strictly greater than the root's.
class PatternPool {
  public:
    explicit PatternPool(PoolParams params);

    const PoolParams& params() const noexcept { return params_; }

    void record(const Pattern& p, Cost solution_cost = kInfeasible);

    // Records every pattern of every route, lengths l_min..l_max (length-major
    // order). Returns the number of occurrences counted.
    std::size_t extract(const Solution& sol, Cost solution_cost = kInfeasible);

    // Per length, min(phi_size, heap size) distinct heap patterns drawn uniformly.
    std::vector<Pattern> sample_candidates(int phi_size, std::mt19937_64& rng) const;

    std::int64_t frequency(const Pattern& p) const;
    std::size_t distinct() const noexcept { return entries_.size(); }
    std::int64_t total_mass() const noexcept { return mass_; }
    std::size_t heap_size(int length) const;
    std::vector<Pattern> heap_contents(int length) const;
    const PatternEntry* heap_root(int length) const;
    const std::vector<PatternEntry>& entries() const noexcept { return entries_; }

    // Checks every heap/map invariant; used by tests.
    bool check_invariants() const;

    // CSV "length,sequence,frequency,best_cost", sorted by length then rank.
    void dump(std::ostream& out) const;
    static PatternPool load(std::istream& in, PoolParams params);

  private:
    bool worse(int a, int b) const;  // a ranks below b
    void sift_up(std::vector<int>& heap, int pos);
    void sift_down(std::vector<int>& heap, int pos);
    void place(std::vector<int>& heap, int pos, int id);
    std::vector<int>& heap_for(int length) { return heaps_[length - params_.l_min]; }

    PoolParams params_;
    std::vector<PatternEntry> entries_;
    std::unordered_map<Pattern, int, PatternHash> index_;
    std::vector<std::vector<int>> heaps_;
    std::int64_t clock_ = 0;
    std::int64_t mass_ = 0;
};

}  // namespace pils
