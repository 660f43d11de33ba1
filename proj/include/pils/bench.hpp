#pragma once

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pils/hosts.hpp"
#include "pils/solution_io.hpp"

namespace pils::bench {

// Unreadable or inconsistent input files (exit code 2).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A produced artifact failed its own check (exit code 3).
class InvariantFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunSpec {
    std::vector<std::string> instances;
    HostKind host = HostKind::Hgs;
    bool pils = true;
    std::optional<int> phi_freq, phi_size, l_min, l_max;
    std::optional<double> p_ex;
    double t_max = 60;
    std::int64_t max_iterations = -1;
    int seeds = 5;
    std::uint64_t first_seed = 1;
    std::string bks_path;
    std::string metadata_path;  // ablate only: instance,<category columns...>
    std::string out_dir = "results";
    double snapshot_fraction = -1;
    bool move_log = true;     // per-move CSV for every run
    bool event_log = false;   // full event CSV (large)
    bool dump_pools = false;

    // Throws std::invalid_argument.
    void validate() const;
    HostConfig config_for(const Instance& inst, bool pils_on, std::uint64_t seed) const;
};

struct SummaryRow {
    std::string instance;
    HostKind host = HostKind::Hgs;
    bool pils = true;
    std::uint64_t seed = 0;
    int n = 0;
    std::int64_t iterations = 0;
    Cost cost = 0;
    std::optional<double> gap;
    double wall_s = 0;
    double t_pils_pct = 0;
};

struct SolveReport {
    std::vector<SummaryRow> rows;  // sorted by instance, host, pils, seed
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

// Called after every run with the in-memory result.
using RunObserver = std::function<void(const SummaryRow&, const RunResult&)>;

std::string run_stem(const std::string& instance, HostKind host, bool pils, std::uint64_t seed);

// Runs every instance x seed in the RunSpec::pils arm. Writes
// <out>/runs/<stem>.{sol,run.csv,trace.csv[,moves.csv,events.csv,pool.csv]},
// <out>/summary.csv and <out>/timing.csv.
SolveReport cmd_solve(const RunSpec& spec, const RunObserver& observer = {});

struct AblationPair {
    std::string instance;
    std::uint64_t seed = 0;
    int n = 0;
    Cost cost_off = 0, cost_on = 0;
    std::optional<double> gap_off, gap_on;
    double t_pils_pct = 0;
};

struct CategoryRow {
    std::string group;  // all, size, or a metadata column
    std::string value;
    int pairs = 0;
    double mean_cost_off = 0, mean_cost_on = 0;
    std::optional<double> mean_gap_off, mean_gap_on;
    double mean_t_pils_pct = 0;
};

struct AblationReport {
    SolveReport runs;
    std::vector<AblationPair> pairs;
    std::vector<CategoryRow> categories;
};

std::vector<CategoryRow> categorize(const std::vector<AblationPair>& pairs,
                                    const std::map<std::string, std::map<std::string, std::string>>& metadata);

// Both arms with identical seeds; adds <out>/ablation.csv and
// <out>/ablation_categories.csv.
AblationReport cmd_ablate(const RunSpec& spec, const RunObserver& observer = {});

// Frequency vs quality.
struct PoolRow {
    int length = 0;
    std::vector<int> seq;
    std::int64_t frequency = 0;
    std::optional<Cost> best_cost;
};

std::vector<PoolRow> read_pool_dump(std::istream& in);
std::vector<PoolRow> pool_rows(const PatternPool& pool);

struct Bin {
    int index = 0;  // 1-based
    std::size_t patterns = 0;
    std::int64_t freq_max = 0, freq_min = 0;
    double presence = 0;
    std::optional<double> mean_gap;
};

struct BinReport {
    std::map<int, std::vector<Bin>> bins;  // by pattern length
    std::map<int, bool> monotone;          // presence non-increasing over bins
};

// Ranks each length by frequency (stable on input order) and cuts bins of
// bin_size patterns, at most max_bins per length (0: no limit).
BinReport analyze_bins(const std::vector<PoolRow>& rows, const Instance& inst, const Solution& reference,
                       std::optional<Cost> bks, int bin_size, int max_bins = 0);
void write_bins(const BinReport& report, std::ostream& out);
BinReport cmd_analyze_bins(const std::string& pool_path, const std::string& instance_path,
                           const std::string& reference_path, const std::string& bks_path,
                           const std::string& out_path, int bin_size = 0, int max_bins = 5);

// Move statistics.
struct MoveStats {
    std::size_t moves = 0;
    std::map<int, double> order, size, routes;  // normalized histograms
    std::map<std::string, double> phase_ms;
    double wall_ms = 0;
    std::map<std::string, double> phase_share;  // phase_ms / wall_ms
};

MoveStats move_stats(const std::vector<MoveRecord>& moves,
                     const std::map<std::string, double>& phase_ms, double wall_ms);
void write_move_stats(const MoveStats& stats, std::ostream& out);
// Paths are run directories or <stem>.run.csv files.
MoveStats cmd_move_stats(const std::vector<std::string>& paths, const std::string& out_path,
                         std::vector<std::string>* warnings = nullptr);

// Convergence.
struct RunTrace {
    std::string instance;
    HostKind host = HostKind::Hgs;
    bool pils = true;
    std::uint64_t seed = 0;
    double budget_ms = 0;
    std::vector<std::pair<double, Cost>> points;  // (wall_ms, best cost), increasing time
};

// Best cost found by fraction * budget; the first point when nothing was
// found yet, the last point at fraction >= 1.
Cost best_at(const RunTrace& trace, double fraction);

struct ConvergenceRow {
    std::string instance;
    HostKind host = HostKind::Hgs;
    bool pils = true;
    double fraction = 0;
    int runs = 0;
    double mean_cost = 0;
    std::optional<double> mean_gap;
};

const std::vector<double>& default_fractions();
std::vector<ConvergenceRow> convergence(const std::vector<RunTrace>& traces,
                                        const std::vector<double>& fractions, const BksTable& bks);
void write_convergence(const std::vector<ConvergenceRow>& rows, std::ostream& out);
std::vector<ConvergenceRow> cmd_convergence(const std::vector<std::string>& paths,
                                            const std::vector<double>& fractions,
                                            const std::string& bks_path, const std::string& out_path);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace pils::bench
