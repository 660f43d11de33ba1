// One PASS/FAIL line per acceptance criterion. The ablation block runs
// instances x seeds x {hgs, gls} x {off, on} at --tmax seconds each.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fragment_gen.hpp"
#include "ls_oracle.hpp"
#include "pils/bench.hpp"
#include "pils/reconnect.hpp"
#include "pool_oracle.hpp"
#include "test_util.hpp"

using namespace pils;
using namespace pils::bench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<std::string> lines;
int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::string line = std::string(pass ? "PASS " : "FAIL ") + name + ": " + detail;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(std::move(line));
    failures += !pass;
}

void note(const std::string& text) {
    std::printf("  %s\n", text.c_str());
    std::fflush(stdout);
    lines.push_back("  " + text);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void reconnect_oracle() {
    std::mt19937_64 rng(7);
    int trials = 0, mismatches = 0;
    double solver_s = 0;
    for (; trials < 1200; ++trials) {
        const int routes = 2 + trials % 3;
        const int mids = 1 + static_cast<int>(rng() % std::max(1, 9 - 2 * routes));
        auto [inst, sets] = testutil::random_fragment_sets(routes, mids, rng);
        const auto mode = trials % 2 ? FeasibilityMode::Forbidden : FeasibilityMode::Penalized;
        const CostParams params{CostParams::defaults_for(inst).penalty_per_unit, mode};
        const auto t0 = Clock::now();
        const auto fast = best_reconnect(sets, inst, params);
        solver_s += seconds_since(t0);
        const auto bf = brute_force_reconnect(sets, inst, params);
        mismatches += fast.best_cost != bf.best_cost;
    }
    report(mismatches == 0 && solver_s < 10.0, "reconnection oracle",
           std::to_string(trials) + " fragment sets, " + std::to_string(mismatches) + " mismatches, " +
               fixed(solver_s, 3) + " s in best_reconnect");
}

void extraction_formula() {
    std::mt19937_64 rng(11);
    int bad_counts = 0, bad_mirror = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 5 + static_cast<int>(rng() % 196);
        const Instance inst = testutil::random_instance(n, 100 + k, 1000000);
        Solution s = testutil::random_solution(inst, 1 + static_cast<int>(rng() % (n / 4 + 1)), rng);
        PatternPool fwd({3, 5, 1000000}), bwd({3, 5, 1000000});
        fwd.extract(s);
        for (int l = 3; l <= 5; ++l) {
            std::int64_t mass = 0;
            for (const auto& e : fwd.entries())
                if (e.pattern.length() == l) mass += e.frequency;
            bad_counts += mass != testutil::expected_count(s, l, l);
        }
        for (auto& r : s.routes) std::reverse(r.customers.begin(), r.customers.end());
        bwd.extract(s);
        std::map<std::vector<int>, std::int64_t> a, b;
        for (const auto& e : fwd.entries()) a[e.pattern.seq] = e.frequency;
        for (const auto& e : bwd.entries()) b[e.pattern.seq] = e.frequency;
        bad_mirror += a != b;
    }
    report(bad_counts == 0 && bad_mirror == 0, "extraction formula",
           "100 solutions, " + std::to_string(bad_counts) + " per-length count mismatches, " +
               std::to_string(bad_mirror) + " mirror mismatches");
}

void heap_vs_sort() {
    int mismatches = 0, checks = 0;
    for (int phi : {1, 5, 40, 200, 500}) {
        const Instance inst = testutil::random_instance(40, 10 + phi, 1000);
        std::mt19937_64 rng(phi);
        PatternPool pool({3, 5, phi});
        testutil::PoolReplay oracle(3, 5);
        for (int k = 0; k < 50; ++k) {
            Solution s = testutil::random_solution(inst, 3 + k % 4, rng);
            if (k % 3) std::sort(s.routes[0].customers.begin(), s.routes[0].customers.end());
            pool.extract(s);
            oracle.add_solution(s);
        }
        for (int l = 3; l <= 5; ++l, ++checks)
            mismatches += testutil::as_set(pool.heap_contents(l)) != oracle.top(l, phi);
    }
    report(mismatches == 0, "heap vs sort",
           std::to_string(checks) + " (phi, length) heaps after 50 solutions, " + std::to_string(mismatches) +
               " differ from the sorted top");
}

void local_search_soundness() {
    std::size_t checked = 0, wrong = 0;
    for (std::uint64_t seed = 0; checked < 10000; ++seed) {
        const Instance inst = testutil::random_instance(25, 500 + seed);
        const CostParams p = CostParams::defaults_for(inst);
        std::mt19937_64 rng(seed);
        LocalSearch ls(inst);
        ls.load(testutil::random_solution(inst, 2 + static_cast<int>(seed % 5), rng), p);
        for (int k = 0; k < 200; ++k, ++checked) {
            const Move m = testutil::random_move(ls, rng);
            const Cost before = testutil::recomputed_cost(inst, ls.export_solution(), p);
            const Cost d = ls.evaluate(m);
            ls.apply(m);
            wrong += testutil::recomputed_cost(inst, ls.export_solution(), p) - before != d;
        }
    }
    int minima = 0, not_minimal = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const int n = 20 + 4 * static_cast<int>(seed);
        const Instance inst = testutil::random_instance(n, 900 + seed);
        for (auto mode : {FeasibilityMode::Penalized, FeasibilityMode::Forbidden}) {
            const CostParams p{CostParams::defaults_for(inst).penalty_per_unit, mode};
            std::mt19937_64 rng(seed);
            testutil::Routes single;
            for (int c = 1; c <= n; ++c) single.push_back({c});
            LocalSearch ls(inst, {n - 1});
            const Solution out = ls.descend(Solution::from_routes(inst, single), p, rng);
            ++minima;
            not_minimal += !testutil::is_local_minimum(inst, testutil::routes_of(out), p);
        }
    }
    report(wrong == 0 && not_minimal == 0, "local search soundness",
           std::to_string(checked) + " move deltas, " + std::to_string(wrong) + " wrong; " +
               std::to_string(minima) + " descents (n <= 48), " + std::to_string(not_minimal) +
               " not locally minimal");
}

struct HostStats {
    std::map<std::string, std::pair<double, double>> sum_cost;  // instance -> (off, on)
    int pairs_per_instance = 0;
    double off = 0, on = 0;
    int runs = 0;
    std::vector<double> t_pils;
};

void determinism(const fs::path& out, const std::string& bks, const std::string& instance) {
    bool all_equal = true;
    std::string detail;
    for (auto host : {HostKind::Hgs, HostKind::Gls}) {
        std::string text[2];
        for (int k = 0; k < 2; ++k) {
            RunSpec spec;
            spec.instances = {instance};
            spec.host = host;
            spec.t_max = 1e6;
            spec.max_iterations = host == HostKind::Hgs ? 300 : 150;
            spec.seeds = 2;
            spec.bks_path = bks;
            spec.out_dir = (out / ("determinism_" + std::string(to_string(host)) + "_" + std::to_string(k))).string();
            fs::remove_all(spec.out_dir);
            cmd_solve(spec);
            std::ifstream in(fs::path(spec.out_dir) / "summary.csv");
            std::stringstream ss;
            ss << in.rdbuf();
            text[k] = ss.str();
        }
        const bool eq = !text[0].empty() && text[0] == text[1];
        all_equal = all_equal && eq;
        detail += std::string(to_string(host)) + (eq ? " identical" : " differs") + " (" +
                  std::to_string(text[0].size()) + " bytes); ";
    }
    report(all_equal, "determinism", detail + "iteration-budgeted runs, 2 seeds each");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    double t_max = 60;
    int seeds = 5, instance_count = 5, trend_instances = 3;
    std::string data_dir = PILS_DATA_DIR, out_dir = "acceptance_out";
    app.add_option("--tmax", t_max, "seconds per ablation run");
    app.add_option("--seeds", seeds, "seeds per instance");
    app.add_option("--instances", instance_count, "smallest X instances used");
    app.add_option("--trend-instances", trend_instances, "instances for the frequency trend");
    app.add_option("--data", data_dir, "directory with instances/ and bks.csv");
    app.add_option("--out", out_dir, "output directory");
    CLI11_PARSE(app, argc, argv);

    const fs::path out(out_dir);
    fs::create_directories(out);
    const std::string bks_path = (fs::path(data_dir) / "bks.csv").string();

    reconnect_oracle();
    extraction_formula();
    heap_vs_sort();
    local_search_soundness();

    // smallest X instances by customer count
    std::vector<std::pair<int, std::string>> xs;
    for (const auto& e : fs::directory_iterator(fs::path(data_dir) / "instances")) {
        const auto name = e.path().stem().string();
        if (name.rfind("X-n", 0) != 0) continue;
        xs.emplace_back(std::stoi(name.substr(3)), e.path().string());
    }
    std::sort(xs.begin(), xs.end());
    xs.resize(std::min<std::size_t>(xs.size(), instance_count));
    std::vector<std::string> paths;
    for (const auto& [n, p] : xs) paths.push_back(p);

    const BksTable bks = load_bks(bks_path);
    std::map<HostKind, HostStats> stats;
    std::map<int, std::int64_t> order_counts;
    std::int64_t moves = 0;
    std::map<std::string, std::pair<Cost, Solution>> best_found;
    std::map<std::string, std::vector<PoolRow>> snapshots;
    std::map<std::string, std::string> path_of;

    for (auto host : {HostKind::Hgs, HostKind::Gls}) {
        RunSpec spec;
        spec.instances = paths;
        spec.host = host;
        spec.t_max = t_max;
        spec.seeds = seeds;
        spec.bks_path = bks_path;
        spec.out_dir = (out / ("ablation_" + std::string(to_string(host)))).string();
        spec.snapshot_fraction = 0.2;
        spec.move_log = false;
        auto& hs = stats[host];
        const auto rep = cmd_ablate(spec, [&](const SummaryRow& row, const RunResult& r) {
            auto& bf = best_found[row.instance];
            if (bf.second.routes.empty() || r.best_cost < bf.first) bf = {r.best_cost, r.best};
            if (!row.pils) return;
            hs.t_pils.push_back(row.t_pils_pct);
            for (const auto& m : r.moves) ++order_counts[m.move_order];
            moves += static_cast<std::int64_t>(r.moves.size());
            if (host == HostKind::Hgs && row.seed == spec.first_seed && r.pool_snapshot)
                snapshots[row.instance] = pool_rows(*r.pool_snapshot);
            note(std::string(to_string(host)) + " " + row.instance + " seed " + std::to_string(row.seed) +
                 " done");
        });
        for (const auto& p : rep.pairs) {
            auto& s = hs.sum_cost[p.instance];
            s.first += static_cast<double>(p.cost_off);
            s.second += static_cast<double>(p.cost_on);
            hs.off += static_cast<double>(p.cost_off);
            hs.on += static_cast<double>(p.cost_on);
            ++hs.runs;
        }
        hs.pairs_per_instance = seeds;
    }
    for (std::size_t k = 0; k < paths.size(); ++k) path_of[load_instance(paths[k]).name()] = paths[k];

    // directional ablation
    {
        bool pass = true;
        std::string detail;
        for (auto host : {HostKind::Hgs, HostKind::Gls}) {
            const auto& hs = stats[host];
            const double off = hs.runs ? hs.off / hs.runs : 0, on = hs.runs ? hs.on / hs.runs : 0;
            pass = pass && hs.runs > 0 && on <= off;
            detail += std::string(to_string(host)) + " mean cost off " + fixed(off) + " on " + fixed(on) + "; ";
        }
        report(pass, "directional ablation",
               detail + std::to_string(paths.size()) + " instances x " + std::to_string(seeds) + " seeds, " +
                   fixed(t_max, 0) + " s per run");
        for (auto host : {HostKind::Hgs, HostKind::Gls})
            for (const auto& [inst, s] : stats[host].sum_cost) {
                const auto it = bks.find(inst);
                std::string line = std::string(to_string(host)) + " " + inst + ": mean off " +
                                   fixed(s.first / seeds) + " on " + fixed(s.second / seeds);
                if (it != bks.end())
                    line += " (gap off " + fixed(100.0 * (s.first / seeds - it->second) / it->second, 3) +
                            "% on " + fixed(100.0 * (s.second / seeds - it->second) / it->second, 3) + "%)";
                note(line);
            }
    }

    // high-order moves
    {
        std::int64_t low = 0, high = 0;
        int max_order = 0;
        for (const auto& [order, count] : order_counts) {
            if (order >= 2 && order <= 5) low += count;
            if (order >= 6) high += count;
            max_order = std::max(max_order, order);
        }
        const double share = moves ? static_cast<double>(low) / static_cast<double>(moves) : 0;
        report(high >= 1 && share >= 0.5, "high-order moves",
               std::to_string(moves) + " applied moves, " + std::to_string(high) + " of order >= 6 (max " +
                   std::to_string(max_order) + "), share of order 2..5 = " + fixed(100 * share, 2) + "%");
    }

    // frequency-quality trend
    {
        int checked = 0, rising = 0;
        for (const auto& [name, rows] : snapshots) {
            if (checked == trend_instances) break;
            const Instance inst = load_instance(path_of.at(name));
            const auto it = bks.find(name);
            const auto rep = analyze_bins(rows, inst, best_found.at(name).second,
                                          it == bks.end() ? std::nullopt : std::optional<Cost>(it->second),
                                          inst.n(), 5);
            ++checked;
            const auto& b3 = rep.bins.at(3);
            const bool ok = b3.size() == 5 && b3[0].presence > b3[4].presence;
            rising += ok;
            for (const auto& [l, bins] : rep.bins) {
                std::string curve = name + " l=" + std::to_string(l) + " presence by bin:";
                for (const auto& b : bins) curve += " " + fixed(b.presence, 3);
                note(curve);
            }
        }
        report(checked >= std::min(3, trend_instances) && rising == checked, "frequency-quality trend",
               std::to_string(rising) + " of " + std::to_string(checked) +
                   " instances have bin-1 presence above bin-5 (length 3, pool at 20% of the budget, "
                   "best-found reference)");
    }

    // T_PILS
    {
        const auto& tp = stats[HostKind::Hgs].t_pils;
        double lo = 100, hi = 0, sum = 0;
        for (double v : tp) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        const double gls_mean = stats[HostKind::Gls].t_pils.empty()
                                    ? 0
                                    : std::accumulate(stats[HostKind::Gls].t_pils.begin(),
                                                      stats[HostKind::Gls].t_pils.end(), 0.0) /
                                          stats[HostKind::Gls].t_pils.size();
        report(!tp.empty() && lo > 0 && hi < 70, "time accounting",
               "hgs T_PILS " + fixed(tp.empty() ? 0 : sum / tp.size()) + "% mean, range [" + fixed(lo) + ", " +
                   fixed(hi) + "]; gls mean " + fixed(gls_mean) + "%");
    }

    determinism(out, bks_path, paths.front());

    std::ofstream rep(out / "report.txt");
    for (const auto& l : lines) rep << l << '\n';
    std::printf("%d failed\n", failures);
    return failures ? 1 : 0;
}
