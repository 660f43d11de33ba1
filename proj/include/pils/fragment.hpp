#pragma once

#include <stdexcept>
#include <vector>

#include "pils/solution.hpp"

namespace pils {

// Beg fragments start at the depot, End fragments finish at it, Mid fragments
// carry no depot. A lone depot is both a valid Beg and a valid End. A Route is
// the result of closing a Beg with an End.
enum class FragmentKind { Beg, Mid, End, Route };

struct Fragment {
    std::vector<int> seq;  // vertices, depot included where anchored
    Load load = 0;
    Cost distance = 0;
    FragmentKind kind = FragmentKind::Mid;

    int first() const { return seq.front(); }
    int last() const { return seq.back(); }
    Cost cost(const CostParams& params, Load capacity) const {
        return params.cost(load, distance, capacity);
    }
};

class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Builds a fragment with load and distance computed from its sequence.
Fragment make_fragment(const Instance& inst, std::vector<int> seq, FragmentKind kind);
inline Fragment depot_fragment(FragmentKind kind) { return Fragment{{0}, 0, 0, kind}; }

// Q(a+b) = Q(a) + Q(b);  D(a+b) = D(a) + d(last(a), first(b)) + D(b).
// Allowed: (Beg|Mid) + (Mid|End). Beg+End yields a Route.
Fragment concat(const Fragment& a, const Fragment& b, const Instance& inst);

// Mid fragments only; beg/end orientation is fixed by the depot.
Fragment reverse_fragment(const Fragment& f);

}  // namespace pils
