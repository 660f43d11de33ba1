#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fragment_gen.hpp"
#include "pils/local_search.hpp"

using namespace pils;

namespace {

using Edge = std::pair<int, int>;

std::multiset<Edge> route_edges(const std::vector<std::vector<int>>& routes) {
    std::multiset<Edge> out;
    for (const auto& r : routes) {
        if (r.empty()) continue;
        int prev = 0;
        for (int c : r) {
            out.insert({std::min(prev, c), std::max(prev, c)});
            prev = c;
        }
        out.insert({0, prev});
    }
    return out;
}

std::multiset<Edge> fragment_edges(const Fragment& f) {
    std::multiset<Edge> out;
    for (std::size_t k = 1; k < f.seq.size(); ++k)
        out.insert({std::min(f.seq[k - 1], f.seq[k]), std::max(f.seq[k - 1], f.seq[k])});
    return out;
}

// The instance used for the 8-edge injection: pattern 3..8 on a horizontal
// line, 1 and 2 just below its ends, 9 and 10 below the depot.
Instance eight_opt_instance() {
    return Instance("eight", {{0, 0}, {-25, 50}, {25, 50}, {25, 60}, {15, 60}, {5, 60}, {-5, 60},
                              {-15, 60}, {-25, 60}, {-5, -20}, {5, -20}},
                    {0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 100);
}

}  // namespace

TEST_CASE("concat bookkeeping") {
    // a = (1,2): D 5, Q 10;  b = (3,4): D 4, Q 7;  d(2,3) = 2
    const Instance inst("cat", {{0, 0}, {0, 10}, {5, 10}, {7, 10}, {11, 10}}, {0, 4, 6, 3, 4}, 50);
    const Fragment a = make_fragment(inst, {1, 2}, FragmentKind::Mid);
    const Fragment b = make_fragment(inst, {3, 4}, FragmentKind::Mid);
    CHECK(a.load == 10);
    CHECK(b.load == 7);
    const Fragment ab = concat(a, b, inst);
    CHECK(ab.load == 17);
    CHECK(ab.distance == 11);
    CHECK(ab.seq == std::vector<int>{1, 2, 3, 4});
    CHECK(ab.kind == FragmentKind::Mid);

    const Fragment beg = make_fragment(inst, {0, 1, 2}, FragmentKind::Beg);
    const Fragment closed = concat(beg, depot_fragment(FragmentKind::End), inst);
    CHECK(closed.kind == FragmentKind::Route);
    CHECK(closed.load == beg.load);
    CHECK(closed.distance == beg.distance + inst.distance(2, 0));
    CHECK(concat(beg, a, inst).kind == FragmentKind::Beg);
    CHECK(concat(a, depot_fragment(FragmentKind::End), inst).kind == FragmentKind::End);

    CHECK_THROWS_AS(concat(depot_fragment(FragmentKind::End), a, inst), ContractViolation);
    CHECK_THROWS_AS(concat(a, beg, inst), ContractViolation);
}

TEST_CASE("reverse fragment") {
    const Instance inst = testutil::random_instance(6, 3);
    const Fragment f = make_fragment(inst, {1, 4, 2}, FragmentKind::Mid);
    const Fragment r = reverse_fragment(f);
    CHECK(r.seq == std::vector<int>{2, 4, 1});
    CHECK(r.distance == f.distance);
    CHECK(r.load == f.load);
    CHECK(reverse_fragment(r).seq == f.seq);
    const Fragment one = make_fragment(inst, {5}, FragmentKind::Mid);
    CHECK(reverse_fragment(one).seq == one.seq);
    CHECK_THROWS_AS(reverse_fragment(make_fragment(inst, {0, 1}, FragmentKind::Beg)),
                    ContractViolation);
    CHECK_THROWS_AS(reverse_fragment(make_fragment(inst, {1, 0}, FragmentKind::End)),
                    ContractViolation);
}

TEST_CASE("contains pattern") {
    const Instance inst = testutil::random_instance(6, 1);
    const Solution s = Solution::from_routes(inst, {{1, 3, 5, 2, 6}, {4}});
    const SolutionIndex idx(inst, s);
    const Pattern yes = canonicalize(std::vector<int>{3, 5, 2}, 3, 5);
    const Pattern mirror = canonicalize(std::vector<int>{2, 5, 3}, 3, 5);
    const Pattern no = canonicalize(std::vector<int>{1, 5, 3}, 3, 5);
    CHECK(contains_pattern(s, yes));
    CHECK(contains_pattern(s, mirror));
    CHECK_FALSE(contains_pattern(s, no));
    CHECK(idx.contains(s, yes));
    CHECK(idx.contains(s, mirror));
    CHECK_FALSE(idx.contains(s, no));

    std::mt19937_64 rng(4);
    const Instance big = testutil::random_instance(30, 2);
    for (int k = 0; k < 300; ++k) {
        const Solution r = testutil::random_solution(big, 1 + k % 5, rng);
        const SolutionIndex ri(big, r);
        std::vector<int> ids(30);
        std::iota(ids.begin(), ids.end(), 1);
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(3);
        const Pattern p = canonicalize(ids, 3, 3);
        CHECK(ri.contains(r, p) == contains_pattern(r, p));
    }
}

TEST_CASE("fragmentize: pattern fills a whole route") {
    const Instance inst = testutil::random_instance(6, 1);
    const Solution s = Solution::from_routes(inst, {{1, 2, 3}, {4, 5, 6}});
    const Pattern p = canonicalize(std::vector<int>{3, 1, 2}, 3, 5);
    const FragmentSets sets = fragmentize(inst, s, p);
    REQUIRE(sets.beg.size() == 1);
    CHECK(sets.beg[0].seq == std::vector<int>{0});
    CHECK(sets.end[0].seq == std::vector<int>{0});
    REQUIRE(sets.mid.size() == 1);
    CHECK(sets.mid[0].seq == p.seq);
    CHECK(sets.init_routes == std::vector<int>{0});
}

TEST_CASE("fragmentize: one interfering vertex") {
    const Instance inst = testutil::random_instance(9, 1);
    const Solution s = Solution::from_routes(inst, {{1, 2, 3, 9, 4, 5}, {6, 7, 8}});
    const Pattern p = canonicalize(std::vector<int>{1, 2, 3, 4}, 3, 5);
    const FragmentSets sets = fragmentize(inst, s, p);
    // removed: (0,1) (3,9) (9,4) (4,5)
    std::multiset<Edge> kept;
    for (const auto* group : {&sets.beg, &sets.mid, &sets.end})
        for (const auto& f : *group)
            for (auto e : fragment_edges(f)) kept.insert(e);
    const std::multiset<Edge> old = route_edges({s.routes[0].customers});
    std::multiset<Edge> removed, added;
    std::set_difference(old.begin(), old.end(), kept.begin(), kept.end(),
                        std::inserter(removed, removed.end()));
    std::set_difference(kept.begin(), kept.end(), old.begin(), old.end(),
                        std::inserter(added, added.end()));
    CHECK(removed == std::multiset<Edge>{{0, 1}, {3, 9}, {4, 9}, {4, 5}});
    CHECK(added == std::multiset<Edge>{{3, 4}});
}

TEST_CASE("fragmentize removes exactly the edges incident to pattern vertices") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const Instance inst = testutil::random_instance(20, 50 + trial);
        const Solution s = testutil::random_solution(inst, 1 + trial % 5, rng);
        std::vector<int> ids(20);
        std::iota(ids.begin(), ids.end(), 1);
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(3 + trial % 3);
        const Pattern p = canonicalize(ids, 3, 5);
        if (contains_pattern(s, p)) continue;
        const FragmentSets sets = fragmentize(inst, s, p);

        std::set<int> touched;
        for (int v : p.seq)
            for (std::size_t r = 0; r < s.routes.size(); ++r)
                for (int c : s.routes[r].customers)
                    if (c == v) touched.insert(static_cast<int>(r));
        CHECK(std::set<int>(sets.init_routes.begin(), sets.init_routes.end()) == touched);
        CHECK(sets.beg.size() == touched.size());
        CHECK(sets.end.size() == touched.size());

        std::vector<std::vector<int>> init;
        for (int r : touched) init.push_back(s.routes[r].customers);
        const std::set<int> pv(p.seq.begin(), p.seq.end());
        std::multiset<Edge> expected;
        for (auto e : route_edges(init))
            if (!pv.count(e.first) && !pv.count(e.second)) expected.insert(e);
        for (auto e : fragment_edges(sets.mid[sets.pattern_index])) expected.insert(e);

        std::multiset<Edge> got;
        std::multiset<int> customers;
        for (const auto* group : {&sets.beg, &sets.mid, &sets.end})
            for (const auto& f : *group) {
                for (auto e : fragment_edges(f)) got.insert(e);
                for (int c : f.seq)
                    if (c) customers.insert(c);
            }
        CHECK(got == expected);
        std::multiset<int> want;
        for (const auto& r : init) want.insert(r.begin(), r.end());
        CHECK(customers == want);
    }
}

TEST_CASE("eight edges replaced by a size-6 pattern over two routes") {
    const Instance inst = eight_opt_instance();
    const Solution s = Solution::from_routes(inst, {{1, 3, 4, 2}, {5, 9, 6, 7, 10, 8}});
    const Pattern p = canonicalize(std::vector<int>{3, 4, 5, 6, 7, 8}, 3, 6);
    const CostParams params = CostParams::defaults_for(inst);
    const FragmentSets sets = fragmentize(inst, s, p);
    CHECK(sets.beg.size() == 2);
    const ReconnectResult res = best_reconnect(sets, inst, params);
    REQUIRE(res.improved);
    CHECK(res.best_cost == brute_force_reconnect(sets, inst, params).best_cost);
    const Solution after = Solution::from_routes(inst, res.routes);
    CHECK(after.canonical_routes() ==
          Solution::from_routes(inst, {{1, 8, 7, 6, 5, 4, 3, 2}, {9, 10}}).canonical_routes());
    CHECK(replaced_edges(sets.init, res.routes) == 8);

    Solution inc = s;
    std::mt19937_64 rng(1);
    std::vector<MoveRecord> log;
    const PassStats st = pils_pass(inst, inc, {p}, params, rng, {}, &log);
    CHECK(st.applied == 1);
    REQUIRE(log.size() == 1);
    CHECK(log[0].move_order == 8);
    CHECK(log[0].pattern_length == 6);
    CHECK(log[0].routes == 2);
    CHECK(contains_pattern(inc, p));
}

TEST_CASE("single beg and end") {
    const Instance inst = testutil::random_instance(4, 8);
    const CostParams params = CostParams::defaults_for(inst);
    FragmentSets sets;
    sets.beg.push_back(make_fragment(inst, {0, 2, 1}, FragmentKind::Beg));
    sets.end.push_back(make_fragment(inst, {3, 0}, FragmentKind::End));
    sets.init = {{1, 2, 3}};
    sets.init_routes = {0};
    const ReconnectResult res = best_reconnect(sets, inst, params);
    const Cost joined = route_cost(inst, std::vector<int>{2, 1, 3}, params);
    CHECK(res.improved == (joined < init_cost(inst, sets, params)));
    if (res.improved) CHECK(res.routes == std::vector<std::vector<int>>{{2, 1, 3}});
    CHECK(res.best_cost == std::min(joined, init_cost(inst, sets, params)));
}

TEST_CASE("brute force guards and singleton") {
    std::mt19937_64 rng(3);
    auto [inst, sets] = testutil::random_fragment_sets(1, 1, rng);
    const CostParams params = CostParams::defaults_for(inst);
    const auto bf = brute_force_reconnect(sets, inst, params);
    CHECK(bf.best_cost <= bf.init_cost);
    CHECK(bf.best_cost == best_reconnect(sets, inst, params).best_cost);
    auto big = testutil::random_fragment_sets(5, 1, rng);
    CHECK_THROWS_AS(brute_force_reconnect(big.second, big.first, params), std::length_error);
    auto many = testutil::random_fragment_sets(2, 7, rng);
    CHECK_THROWS_AS(brute_force_reconnect(many.second, many.first, params), std::length_error);
}

TEST_CASE("best reconnect equals brute force, with and without pruning") {
    std::mt19937_64 rng(2024);
    int improved = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int routes = 2 + trial % 3;
        const int max_mids = std::max(1, 9 - 2 * routes);
        const int mids = 1 + static_cast<int>(rng() % max_mids);
        auto [inst, sets] = testutil::random_fragment_sets(routes, mids, rng);
        const auto mode = trial % 2 ? FeasibilityMode::Forbidden : FeasibilityMode::Penalized;
        const CostParams params{CostParams::defaults_for(inst).penalty_per_unit, mode};
        const auto fast = best_reconnect(sets, inst, params, {true, true});
        const auto slow = best_reconnect(sets, inst, params, {false, false});
        const auto bf = brute_force_reconnect(sets, inst, params);
        CAPTURE(trial);
        REQUIRE(fast.best_cost == bf.best_cost);
        REQUIRE(slow.best_cost == bf.best_cost);
        REQUIRE(fast.improved == bf.improved);
        CHECK(fast.nodes <= slow.nodes);
        if (!fast.improved) continue;
        ++improved;
        // completeness: same customers, one route per beg, cost as claimed
        std::multiset<int> before, after;
        for (const auto& r : sets.init) before.insert(r.begin(), r.end());
        for (const auto& r : fast.routes) after.insert(r.begin(), r.end());
        CHECK(before == after);
        CHECK(fast.routes.size() == sets.init.size());
        Cost total = 0;
        for (const auto& r : fast.routes) total += route_cost(inst, r, params);
        CHECK(total == fast.best_cost);
    }
    CHECK(improved > 100);
}

TEST_CASE("pils pass") {
    const Instance inst = testutil::random_instance(30, 99);
    const CostParams params = CostParams::defaults_for(inst);
    std::mt19937_64 rng(7);
    LocalSearch ls(inst);

    SUBCASE("empty and contained candidate sets leave the solution unchanged") {
        Solution s = testutil::random_solution(inst, 4, rng);
        const auto before = s.canonical_routes();
        pils_pass(inst, s, {}, params, rng);
        CHECK(s.canonical_routes() == before);
        PatternPool pool({3, 5, 1000});
        pool.extract(s);
        const auto st = pils_pass(inst, s, pool.sample_candidates(1000, rng), params, rng);
        CHECK(st.contained == st.candidates);
        CHECK(s.canonical_routes() == before);
    }

    SUBCASE("applied moves are exact and bounded") {
        PatternPool pool({3, 5, 150});
        std::size_t applied = 0;
        for (int round = 0; round < 40; ++round) {
            Solution s = ls.descend(testutil::random_solution(inst, 3 + round % 5, rng), params, rng);
            if (round >= 10) {
                std::vector<MoveRecord> log;
                const auto candidates = pool.sample_candidates(30, rng);
                Solution probe = s;
                InjectionOptions opts;
                opts.reconnect.verify_bookkeeping = true;
                const Cost before = solution_cost(inst, probe, params);
                const auto st = pils_pass(inst, probe, candidates, params, rng, opts, &log);
                const Cost after = solution_cost(inst, probe, params);
                CHECK(after <= before);
                CHECK(after - before == st.delta);
                CHECK(testutil::recomputed_cost(inst, probe, params) == after);
                const auto rep = validate(inst, probe);
                CHECK(rep.missing.empty());
                CHECK(rep.duplicated.empty());
                CHECK(rep.cache_mismatches.empty());
                Cost logged = 0;
                for (const auto& m : log) {
                    CHECK(m.move_order >= 2);
                    CHECK(m.move_order <= 2 * m.pattern_length);
                    CHECK(m.delta < 0);
                    CHECK(m.routes >= 1);
                    CHECK(m.routes <= 4);
                    logged += m.delta;
                }
                CHECK(logged == st.delta);
                applied += st.applied;
            }
            pool.extract(s, solution_cost(inst, s, params));
        }
        CHECK(applied > 0);
    }

    SUBCASE("each applied injection leaves its pattern in place") {
        PatternPool pool({3, 5, 200});
        for (int round = 0; round < 15; ++round)
            pool.extract(ls.descend(testutil::random_solution(inst, 4, rng), params, rng));
        int checked = 0;
        for (const auto& p : pool.sample_candidates(200, rng)) {
            Solution s = ls.descend(testutil::random_solution(inst, 5, rng), params, rng);
            if (contains_pattern(s, p)) continue;
            const auto st = pils_pass(inst, s, {p}, params, rng);
            if (st.applied) {
                CHECK(contains_pattern(s, p));
                ++checked;
            }
        }
        CHECK(checked > 0);
    }

    SUBCASE("forbidden mode keeps feasibility") {
        const CostParams forbidden{params.penalty_per_unit, FeasibilityMode::Forbidden};
        PatternPool pool({3, 5, 200});
        for (int round = 0; round < 30; ++round) {
            std::vector<std::vector<int>> single;
            for (int c = 1; c <= inst.n(); ++c) single.push_back({c});
            Solution s = ls.descend(Solution::from_routes(inst, single), forbidden, rng);
            REQUIRE(is_feasible(inst, s));
            const Cost before = solution_cost(inst, s, forbidden);
            pils_pass(inst, s, pool.sample_candidates(40, rng), forbidden, rng);
            CHECK(is_feasible(inst, s));
            CHECK(solution_cost(inst, s, forbidden) <= before);
            pool.extract(s);
        }
    }

    SUBCASE("max_routes skips spread patterns") {
        Solution s = Solution::from_routes(inst, {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}});
        std::vector<std::vector<int>> rest;
        for (int c = 11; c <= 30; ++c) rest.push_back({c});
        for (auto& r : rest) s.routes.push_back(Route{r, 0, 0});
        s.refresh(inst);
        const Pattern p = canonicalize(std::vector<int>{1, 3, 5, 7, 9}, 3, 5);
        InjectionOptions opts;
        opts.max_routes = 4;
        const auto st = pils_pass(inst, s, {p}, params, rng, opts);
        CHECK(st.too_spread == 1);
        CHECK(st.reconnected == 0);
    }
}
