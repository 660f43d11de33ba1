#include "pils/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "pils/reconnect.hpp"

namespace pils::bench {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    return in;
}

template <class T>
T parse_num(const std::string& s, const std::string& what) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InputError("bad number '" + s + "' in " + what);
    return v;
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "key,value") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InputError("malformed line in " + path.string());
        kv[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key,
                        const fs::path& path) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InputError(path.string() + " lacks '" + key + "'");
    return it->second;
}

HostKind parse_host(const std::string& s) {
    if (s == "hgs") return HostKind::Hgs;
    if (s == "gls") return HostKind::Gls;
    throw InputError("unknown host '" + s + "'");
}

const char* on_off(bool b) { return b ? "on" : "off"; }

std::optional<Cost> lookup_bks(const BksTable& bks, const std::string& name, const std::string& path) {
    if (auto it = bks.find(name); it != bks.end()) return it->second;
    if (auto it = bks.find(fs::path(path).stem().string()); it != bks.end()) return it->second;
    return std::nullopt;
}

void write_run_files(const fs::path& dir, const std::string& stem, const Instance& inst,
                     const HostConfig& cfg, const SummaryRow& row, const RunResult& r,
                     const RunSpec& spec) {
    const fs::path sol_path = dir / (stem + ".sol");
    save_solution(r.best, sol_path.string());
    const Solution back = load_solution(sol_path.string(), inst);
    const auto report = validate(inst, back);
    if (!report.ok()) throw InvariantFailure(sol_path.string() + ": " + report.describe());
    if (back.total_distance() != r.best_cost)
        throw InvariantFailure(sol_path.string() + ": cost does not match the run result");

    {
        auto out = open_out(dir / (stem + ".run.csv"));
        out << "key,value\n";
        out << "instance," << row.instance << '\n';
        out << "host," << to_string(row.host) << '\n';
        out << "pils," << on_off(row.pils) << '\n';
        out << "seed," << row.seed << '\n';
        out << "n," << row.n << '\n';
        out << "t_max_s," << format_number(cfg.t_max) << '\n';
        out << "max_iterations," << cfg.max_iterations << '\n';
        out << "iterations," << r.iterations << '\n';
        out << "cost," << r.best_cost << '\n';
        out << "wall_ms," << format_number(r.wall_ms) << '\n';
        out << "pils_ms," << format_number(r.pils_ms) << '\n';
        for (const auto& [phase, ms] : r.phase_ms) out << "phase." << phase << ',' << format_number(ms) << '\n';
    }
    {
        auto out = open_out(dir / (stem + ".trace.csv"));
        out << "wall_ms,cost,pils_cum_ms\n";
        for (const auto& e : r.best_trace)
            out << format_number(e.wall_ms) << ',' << e.cost << ',' << format_number(e.pils_cum_ms) << '\n';
    }
    if (spec.move_log) {
        auto out = open_out(dir / (stem + ".moves.csv"));
        out << "pattern_length,move_order,routes,delta\n";
        for (const auto& m : r.moves)
            out << m.pattern_length << ',' << m.move_order << ',' << m.routes << ',' << m.delta << '\n';
    }
    if (spec.event_log) {
        auto out = open_out(dir / (stem + ".events.csv"));
        out << "wall_ms,event,cost,pils_cum_ms,phase_ms\n";
        for (const auto& e : r.events)
            out << format_number(e.wall_ms) << ',' << e.event << ',' << e.cost << ','
                << format_number(e.pils_cum_ms) << ',' << format_number(e.phase_ms) << '\n';
    }
    if (spec.dump_pools && r.pool) {
        auto out = open_out(dir / (stem + ".pool.csv"));
        r.pool->dump(out);
        if (r.pool_snapshot) {
            auto snap = open_out(dir / (stem + ".pool_snapshot.csv"));
            r.pool_snapshot->dump(snap);
        }
    }
}

void write_summary(const fs::path& out_dir, const std::vector<SummaryRow>& rows) {
    auto summary = open_out(out_dir / "summary.csv");
    summary << "instance,host,pils,seed,iterations,cost,gap\n";
    auto timing = open_out(out_dir / "timing.csv");
    timing << "instance,host,pils,seed,wall_s,t_pils_pct\n";
    for (const auto& r : rows) {
        summary << r.instance << ',' << to_string(r.host) << ',' << on_off(r.pils) << ',' << r.seed << ','
                << r.iterations << ',' << r.cost << ',' << opt_number(r.gap) << '\n';
        timing << r.instance << ',' << to_string(r.host) << ',' << on_off(r.pils) << ',' << r.seed << ','
               << format_number(r.wall_s) << ',' << format_number(r.t_pils_pct) << '\n';
    }
}

void run_arms(const RunSpec& spec, const std::vector<bool>& arms, const RunObserver& observer,
              SolveReport& rep) {
    spec.validate();
    BksTable bks;
    if (!spec.bks_path.empty()) {
        try {
            bks = load_bks(spec.bks_path);
        } catch (const std::exception& e) {
            throw InputError(spec.bks_path + ": " + e.what());
        }
    }
    const fs::path out_dir(spec.out_dir);
    const fs::path run_dir = out_dir / "runs";
    fs::create_directories(run_dir);

    for (const auto& path : spec.instances) {
        std::optional<Instance> inst;
        try {
            inst.emplace(load_instance(path));
        } catch (const std::exception& e) {
            rep.errors.push_back(path + ": " + e.what());
            continue;
        }
        const std::string name = inst->name().empty() ? fs::path(path).stem().string() : inst->name();
        const auto ref = lookup_bks(bks, name, path);
        if (!ref) rep.warnings.push_back(name + ": no BKS entry, gap left empty");

        for (int k = 0; k < spec.seeds; ++k) {
            const std::uint64_t seed = spec.first_seed + static_cast<std::uint64_t>(k);
            for (bool arm : arms) {
                const HostConfig cfg = spec.config_for(*inst, arm, seed);
                const RunResult r = run_host(*inst, cfg);
                SummaryRow row;
                row.instance = name;
                row.host = spec.host;
                row.pils = arm;
                row.seed = seed;
                row.n = inst->n();
                row.iterations = r.iterations;
                row.cost = r.best_cost;
                if (ref) {
                    if (r.best_cost < *ref)
                        throw InvariantFailure(name + ": cost " + std::to_string(r.best_cost) +
                                               " is below the BKS " + std::to_string(*ref));
                    row.gap = gap_percent(r.best_cost, *ref);
                }
                row.wall_s = r.wall_ms / 1000.0;
                row.t_pils_pct = r.t_pils_pct();
                write_run_files(run_dir, run_stem(name, spec.host, arm, seed), *inst, cfg, row, r, spec);
                if (observer) observer(row, r);
                rep.rows.push_back(std::move(row));
            }
        }
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        return std::tie(a.instance, a.host, a.pils, a.seed) < std::tie(b.instance, b.host, b.pils, b.seed);
    });
    write_summary(out_dir, rep.rows);
}

std::map<std::string, std::map<std::string, std::string>> read_metadata(const std::string& path) {
    std::map<std::string, std::map<std::string, std::string>> meta;
    if (path.empty()) return meta;
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty metadata file");
    const auto header = split_csv(line);
    if (header.empty() || header[0] != "instance") throw InputError(path + ": first column must be 'instance'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) throw InputError(path + ": wrong column count");
        for (std::size_t c = 1; c < cells.size(); ++c) meta[cells[0]][header[c]] = cells[c];
    }
    return meta;
}

std::optional<double> mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::nullopt;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<fs::path> collect_runs(const std::vector<std::string>& paths) {
    static const std::string suffix = ".run.csv";
    auto is_run = [](const fs::path& p) {
        const auto s = p.filename().string();
        return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file() && is_run(e.path())) out.push_back(e.path());
        } else if (fs::is_regular_file(p) && is_run(p)) {
            out.emplace_back(p);
        } else {
            throw InputError(p + ": not a run directory or .run.csv file");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path sibling(const fs::path& run_file, const std::string& ext) {
    auto name = run_file.filename().string();
    name.resize(name.size() - std::string(".run.csv").size());
    return run_file.parent_path() / (name + ext);
}

}  // namespace

void RunSpec::validate() const {
    if (instances.empty()) throw std::invalid_argument("no instances given");
    if (seeds < 1) throw std::invalid_argument("seed count must be at least 1");
    if (!(t_max > 0)) throw std::invalid_argument("t_max must be positive");
    if (out_dir.empty()) throw std::invalid_argument("output directory missing");
}

HostConfig RunSpec::config_for(const Instance& inst, bool pils_on, std::uint64_t seed) const {
    HostConfig c = HostConfig::baseline(inst, host);
    if (phi_freq) c.phi_freq = *phi_freq;
    if (phi_size) c.phi_size = *phi_size;
    if (l_min) c.l_min = *l_min;
    if (l_max) c.l_max = *l_max;
    if (p_ex) c.p_ex = *p_ex;
    c.t_max = t_max;
    c.max_iterations = max_iterations;
    c.seed = seed;
    c.snapshot_fraction = snapshot_fraction;
    c.keep_events = event_log;
    c.validate();
    if (!pils_on) c.disable_pils();
    return c;
}

std::string run_stem(const std::string& instance, HostKind host, bool pils, std::uint64_t seed) {
    return instance + "_" + to_string(host) + "_" + on_off(pils) + "_s" + std::to_string(seed);
}

SolveReport cmd_solve(const RunSpec& spec, const RunObserver& observer) {
    SolveReport rep;
    run_arms(spec, {spec.pils}, observer, rep);
    return rep;
}

std::vector<CategoryRow> categorize(
    const std::vector<AblationPair>& pairs,
    const std::map<std::string, std::map<std::string, std::string>>& metadata) {
    std::map<std::pair<std::string, std::string>, std::vector<const AblationPair*>> groups;
    std::map<std::string, int> sizes;
    for (const auto& p : pairs) sizes[p.instance] = p.n;
    std::vector<int> ns;
    for (const auto& [name, n] : sizes) ns.push_back(n);
    std::sort(ns.begin(), ns.end());
    const int median = ns.empty() ? 0 : ns[(ns.size() - 1) / 2];
    for (const auto& p : pairs) {
        groups[{"all", "all"}].push_back(&p);
        groups[{"size", p.n <= median ? "small" : "large"}].push_back(&p);
        if (auto it = metadata.find(p.instance); it != metadata.end())
            for (const auto& [col, value] : it->second) groups[{col, value}].push_back(&p);
    }
    std::vector<CategoryRow> out;
    for (const auto& [key, members] : groups) {
        CategoryRow row;
        row.group = key.first;
        row.value = key.second;
        row.pairs = static_cast<int>(members.size());
        std::vector<double> off, on, goff, gon, tp;
        for (const auto* p : members) {
            off.push_back(static_cast<double>(p->cost_off));
            on.push_back(static_cast<double>(p->cost_on));
            tp.push_back(p->t_pils_pct);
            if (p->gap_off && p->gap_on) {
                goff.push_back(*p->gap_off);
                gon.push_back(*p->gap_on);
            }
        }
        row.mean_cost_off = *mean_of(off);
        row.mean_cost_on = *mean_of(on);
        row.mean_gap_off = mean_of(goff);
        row.mean_gap_on = mean_of(gon);
        row.mean_t_pils_pct = *mean_of(tp);
        out.push_back(std::move(row));
    }
    return out;
}

AblationReport cmd_ablate(const RunSpec& spec, const RunObserver& observer) {
    const auto metadata = read_metadata(spec.metadata_path);
    AblationReport rep;
    run_arms(spec, {false, true}, observer, rep.runs);

    std::map<std::pair<std::string, std::uint64_t>, std::pair<const SummaryRow*, const SummaryRow*>> match;
    for (const auto& r : rep.runs.rows) {
        auto& slot = match[{r.instance, r.seed}];
        (r.pils ? slot.second : slot.first) = &r;
    }
    for (const auto& [key, arms] : match) {
        if (!arms.first || !arms.second) continue;
        AblationPair p;
        p.instance = key.first;
        p.seed = key.second;
        p.n = arms.first->n;
        p.cost_off = arms.first->cost;
        p.cost_on = arms.second->cost;
        p.gap_off = arms.first->gap;
        p.gap_on = arms.second->gap;
        p.t_pils_pct = arms.second->t_pils_pct;
        rep.pairs.push_back(p);
    }
    rep.categories = categorize(rep.pairs, metadata);

    const fs::path out_dir(spec.out_dir);
    {
        auto out = open_out(out_dir / "ablation.csv");
        out << "instance,host,seed,n,cost_off,cost_on,gap_off,gap_on,t_pils_pct\n";
        for (const auto& p : rep.pairs)
            out << p.instance << ',' << to_string(spec.host) << ',' << p.seed << ',' << p.n << ','
                << p.cost_off << ',' << p.cost_on << ',' << opt_number(p.gap_off) << ','
                << opt_number(p.gap_on) << ',' << format_number(p.t_pils_pct) << '\n';
    }
    {
        auto out = open_out(out_dir / "ablation_categories.csv");
        out << "host,group,value,pairs,mean_cost_off,mean_cost_on,mean_gap_off,mean_gap_on,mean_t_pils_pct\n";
        for (const auto& c : rep.categories)
            out << to_string(spec.host) << ',' << c.group << ',' << c.value << ',' << c.pairs << ','
                << format_number(c.mean_cost_off) << ',' << format_number(c.mean_cost_on) << ','
                << opt_number(c.mean_gap_off) << ',' << opt_number(c.mean_gap_on) << ','
                << format_number(c.mean_t_pils_pct) << '\n';
    }
    return rep;
}

std::vector<PoolRow> read_pool_dump(std::istream& in) {
    std::vector<PoolRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.rfind("length,", 0) == 0) continue;
        const auto cells = split_csv(line);
        const std::string where = "pool dump line " + std::to_string(line_no);
        if (cells.size() != 3 && cells.size() != 4) throw InputError(where + ": expected 3 or 4 columns");
        PoolRow row;
        row.length = parse_num<int>(cells[0], where);
        std::istringstream seq(cells[1]);
        for (int v; seq >> v;) row.seq.push_back(v);
        if (static_cast<int>(row.seq.size()) != row.length) throw InputError(where + ": length mismatch");
        row.frequency = parse_num<std::int64_t>(cells[2], where);
        if (cells.size() == 4 && !cells[3].empty()) row.best_cost = parse_num<Cost>(cells[3], where);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<PoolRow> pool_rows(const PatternPool& pool) {
    std::stringstream ss;
    pool.dump(ss);
    return read_pool_dump(ss);
}

BinReport analyze_bins(const std::vector<PoolRow>& rows, const Instance& inst, const Solution& reference,
                       std::optional<Cost> bks, int bin_size, int max_bins) {
    if (bin_size < 1) throw std::invalid_argument("bin size must be positive");
    if (!validate(inst, reference).missing.empty())
        throw InputError("reference solution misses customers");
    std::map<int, std::vector<const PoolRow*>> by_length;
    for (const auto& r : rows) by_length[r.length].push_back(&r);

    BinReport rep;
    for (auto& [length, list] : by_length) {
        std::stable_sort(list.begin(), list.end(),
                         [](const PoolRow* a, const PoolRow* b) { return a->frequency > b->frequency; });
        auto& bins = rep.bins[length];
        for (std::size_t start = 0; start < list.size(); start += bin_size) {
            if (max_bins > 0 && static_cast<int>(bins.size()) == max_bins) break;
            const std::size_t stop = std::min(list.size(), start + static_cast<std::size_t>(bin_size));
            Bin bin;
            bin.index = static_cast<int>(bins.size()) + 1;
            bin.patterns = stop - start;
            bin.freq_max = list[start]->frequency;
            bin.freq_min = list[stop - 1]->frequency;
            std::size_t present = 0;
            std::vector<double> gaps;
            for (std::size_t k = start; k < stop; ++k) {
                if (contains_pattern(reference, Pattern{list[k]->seq})) ++present;
                if (bks && list[k]->best_cost) gaps.push_back(gap_percent(*list[k]->best_cost, *bks));
            }
            bin.presence = static_cast<double>(present) / static_cast<double>(bin.patterns);
            bin.mean_gap = mean_of(gaps);
            bins.push_back(bin);
        }
        bool mono = true;
        for (std::size_t k = 1; k < bins.size(); ++k) mono = mono && bins[k].presence <= bins[k - 1].presence;
        rep.monotone[length] = mono;
    }
    return rep;
}

void write_bins(const BinReport& report, std::ostream& out) {
    out << "length,bin,patterns,freq_max,freq_min,presence,mean_gap,monotone\n";
    for (const auto& [length, bins] : report.bins)
        for (const auto& b : bins)
            out << length << ',' << b.index << ',' << b.patterns << ',' << b.freq_max << ',' << b.freq_min
                << ',' << format_number(b.presence) << ',' << opt_number(b.mean_gap) << ','
                << (report.monotone.at(length) ? 1 : 0) << '\n';
}

BinReport cmd_analyze_bins(const std::string& pool_path, const std::string& instance_path,
                           const std::string& reference_path, const std::string& bks_path,
                           const std::string& out_path, int bin_size, int max_bins) {
    std::optional<Instance> inst;
    std::optional<Solution> ref;
    std::vector<PoolRow> rows;
    std::optional<Cost> bks;
    try {
        inst.emplace(load_instance(instance_path));
        ref.emplace(load_solution(reference_path, *inst));
        auto in = open_in(pool_path);
        rows = read_pool_dump(in);
        if (!bks_path.empty()) bks = lookup_bks(load_bks(bks_path), inst->name(), instance_path);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    const BinReport rep = analyze_bins(rows, *inst, *ref, bks, bin_size > 0 ? bin_size : inst->n(), max_bins);
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_bins(rep, out);
    }
    return rep;
}

MoveStats move_stats(const std::vector<MoveRecord>& moves, const std::map<std::string, double>& phase_ms,
                     double wall_ms) {
    MoveStats s;
    s.moves = moves.size();
    for (const auto& m : moves) {
        s.order[m.move_order] += 1;
        s.size[m.pattern_length] += 1;
        s.routes[m.routes] += 1;
    }
    for (auto* h : {&s.order, &s.size, &s.routes})
        for (auto& [k, v] : *h) v /= static_cast<double>(s.moves);
    s.phase_ms = phase_ms;
    s.wall_ms = wall_ms;
    if (wall_ms > 0)
        for (const auto& [k, v] : phase_ms) s.phase_share[k] = v / wall_ms;
    return s;
}

void write_move_stats(const MoveStats& stats, std::ostream& out) {
    out << "kind,key,value\n";
    out << "moves,total," << stats.moves << '\n';
    for (const auto& [name, h] : {std::pair{"order", &stats.order}, std::pair{"size", &stats.size},
                                  std::pair{"routes", &stats.routes}})
        for (const auto& [k, v] : *h) out << name << ',' << k << ',' << format_number(v) << '\n';
    out << "wall_ms,total," << format_number(stats.wall_ms) << '\n';
    for (const auto& [k, v] : stats.phase_ms) out << "phase_ms," << k << ',' << format_number(v) << '\n';
    for (const auto& [k, v] : stats.phase_share) out << "phase_share," << k << ',' << format_number(v) << '\n';
}

MoveStats cmd_move_stats(const std::vector<std::string>& paths, const std::string& out_path,
                         std::vector<std::string>* warnings) {
    std::vector<MoveRecord> moves;
    std::map<std::string, double> phase_ms;
    double wall_ms = 0;
    for (const auto& run : collect_runs(paths)) {
        const auto kv = read_key_values(run);
        wall_ms += parse_num<double>(need(kv, "wall_ms", run), run.string());
        for (const auto& [k, v] : kv)
            if (k.rfind("phase.", 0) == 0) phase_ms[k.substr(6)] += parse_num<double>(v, run.string());
        const fs::path mp = sibling(run, ".moves.csv");
        if (!fs::exists(mp)) continue;
        auto in = open_in(mp);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto c = split_csv(line);
            if (c.size() != 4) throw InputError(mp.string() + ": expected 4 columns");
            moves.push_back(MoveRecord{parse_num<int>(c[0], mp.string()), parse_num<int>(c[1], mp.string()),
                                       parse_num<int>(c[2], mp.string()), parse_num<Cost>(c[3], mp.string())});
        }
    }
    if (moves.empty() && warnings) warnings->push_back("no applied PILS moves in the given logs");
    const MoveStats s = move_stats(moves, phase_ms, wall_ms);
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_move_stats(s, out);
    }
    return s;
}

Cost best_at(const RunTrace& trace, double fraction) {
    if (trace.points.empty()) return kInfeasible;
    if (fraction >= 1.0) return trace.points.back().second;
    const double limit = fraction * trace.budget_ms;
    Cost best = trace.points.front().second;
    for (const auto& [t, c] : trace.points) {
        if (t > limit) break;
        best = c;
    }
    return best;
}

const std::vector<double>& default_fractions() {
    static const std::vector<double> f{0.01, 0.02, 0.05, 0.10, 0.15, 0.20, 0.30, 0.50, 0.75, 1.0};
    return f;
}

std::vector<ConvergenceRow> convergence(const std::vector<RunTrace>& traces,
                                        const std::vector<double>& fractions, const BksTable& bks) {
    std::map<std::tuple<std::string, HostKind, bool>, std::vector<const RunTrace*>> groups;
    for (const auto& t : traces) groups[{t.instance, t.host, t.pils}].push_back(&t);
    std::vector<ConvergenceRow> out;
    for (const auto& [key, runs] : groups) {
        const auto it = bks.find(std::get<0>(key));
        for (double f : fractions) {
            ConvergenceRow row;
            row.instance = std::get<0>(key);
            row.host = std::get<1>(key);
            row.pils = std::get<2>(key);
            row.fraction = f;
            row.runs = static_cast<int>(runs.size());
            std::vector<double> costs, gaps;
            for (const auto* r : runs) {
                const Cost c = best_at(*r, f);
                costs.push_back(static_cast<double>(c));
                if (it != bks.end()) gaps.push_back(gap_percent(c, it->second));
            }
            row.mean_cost = *mean_of(costs);
            row.mean_gap = mean_of(gaps);
            out.push_back(row);
        }
    }
    return out;
}

void write_convergence(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
    out << "instance,host,pils,fraction,runs,mean_cost,mean_gap\n";
    for (const auto& r : rows)
        out << r.instance << ',' << to_string(r.host) << ',' << on_off(r.pils) << ','
            << format_number(r.fraction) << ',' << r.runs << ',' << format_number(r.mean_cost) << ','
            << opt_number(r.mean_gap) << '\n';
}

std::vector<ConvergenceRow> cmd_convergence(const std::vector<std::string>& paths,
                                            const std::vector<double>& fractions,
                                            const std::string& bks_path, const std::string& out_path) {
    for (double f : fractions)
        if (!(f > 0 && f <= 1)) throw std::invalid_argument("fractions must lie in (0, 1]");
    BksTable bks;
    if (!bks_path.empty()) {
        try {
            bks = load_bks(bks_path);
        } catch (const std::exception& e) {
            throw InputError(bks_path + ": " + e.what());
        }
    }
    std::vector<RunTrace> traces;
    for (const auto& run : collect_runs(paths)) {
        const auto kv = read_key_values(run);
        RunTrace t;
        t.instance = need(kv, "instance", run);
        t.host = parse_host(need(kv, "host", run));
        t.pils = need(kv, "pils", run) == "on";
        t.seed = parse_num<std::uint64_t>(need(kv, "seed", run), run.string());
        const auto iters = parse_num<std::int64_t>(need(kv, "max_iterations", run), run.string());
        t.budget_ms = iters < 0 ? 1000.0 * parse_num<double>(need(kv, "t_max_s", run), run.string())
                                : parse_num<double>(need(kv, "wall_ms", run), run.string());
        const fs::path tp = sibling(run, ".trace.csv");
        auto in = open_in(tp);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto c = split_csv(line);
            if (c.size() != 3) throw InputError(tp.string() + ": expected 3 columns");
            t.points.emplace_back(parse_num<double>(c[0], tp.string()), parse_num<Cost>(c[1], tp.string()));
        }
        traces.push_back(std::move(t));
    }
    auto rows = convergence(traces, fractions, bks);
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_convergence(rows, out);
    }
    return rows;
}

}  // namespace pils::bench
