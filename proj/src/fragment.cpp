#include "pils/fragment.hpp"

#include <algorithm>

namespace pils {

Fragment make_fragment(const Instance& inst, std::vector<int> seq, FragmentKind kind) {
    if (seq.empty()) throw ContractViolation("empty fragment");
    Fragment f{std::move(seq), 0, 0, kind};
    for (std::size_t k = 0; k < f.seq.size(); ++k) {
        f.load += inst.demand(f.seq[k]);
        if (k > 0) f.distance += inst.distance(f.seq[k - 1], f.seq[k]);
    }
    return f;
}

Fragment concat(const Fragment& a, const Fragment& b, const Instance& inst) {
    const bool a_ok = a.kind == FragmentKind::Beg || a.kind == FragmentKind::Mid;
    const bool b_ok = b.kind == FragmentKind::Mid || b.kind == FragmentKind::End;
    if (!a_ok || !b_ok) throw ContractViolation("incompatible fragment kinds for concatenation");

    Fragment out;
    out.seq.reserve(a.seq.size() + b.seq.size());
    out.seq = a.seq;
    out.seq.insert(out.seq.end(), b.seq.begin(), b.seq.end());
    out.load = a.load + b.load;
    out.distance = a.distance + inst.distance(a.last(), b.first()) + b.distance;
    if (a.kind == FragmentKind::Beg)
        out.kind = b.kind == FragmentKind::End ? FragmentKind::Route : FragmentKind::Beg;
    else
        out.kind = b.kind == FragmentKind::End ? FragmentKind::End : FragmentKind::Mid;
    return out;
}

Fragment reverse_fragment(const Fragment& f) {
    if (f.kind != FragmentKind::Mid) throw ContractViolation("only mid fragments can be reversed");
    Fragment out = f;
    std::reverse(out.seq.begin(), out.seq.end());
    return out;
}

}  // namespace pils
