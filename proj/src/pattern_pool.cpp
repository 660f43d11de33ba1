#include "pils/pattern_pool.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "pils/solution_io.hpp"

namespace pils {

std::size_t PatternHash::operator()(const Pattern& p) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int c : p.seq) {
        h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

Pattern canonicalize(std::span<const int> raw, int l_min, int l_max) {
    const int l = static_cast<int>(raw.size());
    if (l < l_min || l > l_max)
        throw InvalidPattern("pattern length " + std::to_string(l) + " outside [" +
                             std::to_string(l_min) + ", " + std::to_string(l_max) + "]");
    for (int i = 0; i < l; ++i) {
        if (raw[i] <= 0) throw InvalidPattern("pattern contains the depot or a negative id");
        for (int j = i + 1; j < l; ++j)
            if (raw[i] == raw[j])
                throw InvalidPattern("pattern repeats customer " + std::to_string(raw[i]));
    }
    Pattern p{std::vector<int>(raw.begin(), raw.end())};
    if (std::lexicographical_compare(raw.rbegin(), raw.rend(), raw.begin(), raw.end()))
        std::reverse(p.seq.begin(), p.seq.end());
    return p;
}

PatternPool::PatternPool(PoolParams params) : params_(params) {
    if (params_.l_min < 1 || params_.l_max < params_.l_min)
        throw std::invalid_argument("invalid pattern length range");
    if (params_.phi_freq < 0) throw std::invalid_argument("phi_freq must be nonnegative");
    heaps_.resize(params_.l_max - params_.l_min + 1);
}

bool PatternPool::worse(int a, int b) const {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    if (ea.frequency != eb.frequency) return ea.frequency < eb.frequency;
    return ea.stamp > eb.stamp;
}

void PatternPool::place(std::vector<int>& heap, int pos, int id) {
    heap[pos] = id;
    entries_[id].heap_pos = pos;
}

void PatternPool::sift_up(std::vector<int>& heap, int pos) {
    const int id = heap[pos];
    while (pos > 0) {
        const int parent = (pos - 1) / 2;
        if (!worse(id, heap[parent])) break;
        place(heap, pos, heap[parent]);
        pos = parent;
    }
    place(heap, pos, id);
}

void PatternPool::sift_down(std::vector<int>& heap, int pos) {
    const int size = static_cast<int>(heap.size());
    const int id = heap[pos];
    while (true) {
        int child = 2 * pos + 1;
        if (child >= size) break;
        if (child + 1 < size && worse(heap[child + 1], heap[child])) ++child;
        if (!worse(heap[child], id)) break;
        place(heap, pos, heap[child]);
        pos = child;
    }
    place(heap, pos, id);
}

void PatternPool::record(const Pattern& p, Cost solution_cost) {
    const int l = p.length();
    if (l < params_.l_min || l > params_.l_max) throw InvalidPattern("pattern length out of range");
    ++clock_;
    ++mass_;
    auto& heap = heap_for(l);
    auto it = index_.find(p);
    if (it == index_.end()) {
        const int id = static_cast<int>(entries_.size());
        entries_.push_back(PatternEntry{p, 1, clock_, solution_cost, -1});
        index_.emplace(p, id);
        if (static_cast<int>(heap.size()) < params_.phi_freq) {
            heap.push_back(id);
            sift_up(heap, static_cast<int>(heap.size()) - 1);
        }
        return;
    }
    const int id = it->second;
    auto& e = entries_[id];
    ++e.frequency;
    e.stamp = clock_;
    e.best_cost = std::min(e.best_cost, solution_cost);
    if (e.heap_pos >= 0) {
        sift_down(heap, e.heap_pos);
    } else if (static_cast<int>(heap.size()) < params_.phi_freq) {
        heap.push_back(id);
        sift_up(heap, static_cast<int>(heap.size()) - 1);
    } else if (!heap.empty() && e.frequency > entries_[heap[0]].frequency) {
        entries_[heap[0]].heap_pos = -1;
        place(heap, 0, id);
        sift_down(heap, 0);
    }
}

std::size_t PatternPool::extract(const Solution& sol, Cost solution_cost) {
    std::size_t counted = 0;
    for (int l = params_.l_min; l <= params_.l_max; ++l) {
        for (const auto& route : sol.routes) {
            const auto& c = route.customers;
            const int len = static_cast<int>(c.size());
            for (int start = 0; start + l <= len; ++start) {
                record(canonicalize(std::span<const int>(c).subspan(start, l), l, l),
                       solution_cost);
                ++counted;
            }
        }
    }
    return counted;
}

std::vector<Pattern> PatternPool::sample_candidates(int phi_size, std::mt19937_64& rng) const {
    std::vector<Pattern> out;
    if (phi_size <= 0) return out;
    for (const auto& heap : heaps_) {
        std::vector<int> ids = heap;
        const int k = std::min<int>(phi_size, static_cast<int>(ids.size()));
        for (int i = 0; i < k; ++i) {
            std::uniform_int_distribution<int> pick(i, static_cast<int>(ids.size()) - 1);
            std::swap(ids[i], ids[pick(rng)]);
            out.push_back(entries_[ids[i]].pattern);
        }
    }
    return out;
}

std::int64_t PatternPool::frequency(const Pattern& p) const {
    auto it = index_.find(p);
    return it == index_.end() ? 0 : entries_[it->second].frequency;
}

std::size_t PatternPool::heap_size(int length) const {
    if (length < params_.l_min || length > params_.l_max) return 0;
    return heaps_[length - params_.l_min].size();
}

std::vector<Pattern> PatternPool::heap_contents(int length) const {
    std::vector<Pattern> out;
    if (length < params_.l_min || length > params_.l_max) return out;
    for (int id : heaps_[length - params_.l_min]) out.push_back(entries_[id].pattern);
    return out;
}

const PatternEntry* PatternPool::heap_root(int length) const {
    if (length < params_.l_min || length > params_.l_max) return nullptr;
    const auto& heap = heaps_[length - params_.l_min];
    return heap.empty() ? nullptr : &entries_[heap[0]];
}

bool PatternPool::check_invariants() const {
    for (int l = params_.l_min; l <= params_.l_max; ++l) {
        const auto& heap = heaps_[l - params_.l_min];
        std::size_t distinct_of_length = 0;
        for (const auto& e : entries_)
            if (e.pattern.length() == l) ++distinct_of_length;
        if (heap.size() != std::min<std::size_t>(params_.phi_freq, distinct_of_length))
            return false;
        for (std::size_t pos = 0; pos < heap.size(); ++pos) {
            const auto& e = entries_[heap[pos]];
            if (e.heap_pos != static_cast<int>(pos) || e.pattern.length() != l) return false;
            if (pos > 0 && worse(heap[pos], heap[(pos - 1) / 2])) return false;
        }
        if (heap.empty()) continue;
        const auto& root = entries_[heap[0]];
        for (const auto& e : entries_) {
            if (e.pattern.length() != l || e.heap_pos >= 0) continue;
            if (e.frequency > root.frequency) return false;
        }
    }
    std::size_t in_heaps = 0;
    for (const auto& e : entries_) {
        if (e.heap_pos >= 0) ++in_heaps;
        auto it = index_.find(e.pattern);
        if (it == index_.end() || &entries_[it->second] != &e) return false;
    }
    std::size_t heap_total = 0;
    for (const auto& h : heaps_) heap_total += h.size();
    return in_heaps == heap_total;
}

void PatternPool::dump(std::ostream& out) const {
    std::vector<int> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ea = entries_[a];
        const auto& eb = entries_[b];
        if (ea.pattern.length() != eb.pattern.length())
            return ea.pattern.length() < eb.pattern.length();
        return worse(b, a);
    });
    out << "length,sequence,frequency,best_cost\n";
    for (int id : order) {
        const auto& e = entries_[id];
        out << e.pattern.length() << ',';
        for (std::size_t k = 0; k < e.pattern.seq.size(); ++k)
            out << (k ? " " : "") << e.pattern.seq[k];
        out << ',' << e.frequency << ',';
        if (e.best_cost < kInfeasible) out << e.best_cost;
        out << '\n';
    }
}

PatternPool PatternPool::load(std::istream& in, PoolParams params) {
    struct Row {
        Pattern p;
        std::int64_t freq;
        Cost best;
    };
    std::vector<Row> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("length", 0) == 0)) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (line.back() == ',') cols.emplace_back();
        if (cols.size() != 3 && cols.size() != 4)
            throw ParseError(line_no, "expected length,sequence,frequency[,best_cost]");
        std::vector<int> seq;
        std::istringstream ids(cols[1]);
        int c;
        while (ids >> c) seq.push_back(c);
        try {
            const int length = std::stoi(cols[0]);
            if (length != static_cast<int>(seq.size()))
                throw ParseError(line_no, "length column does not match sequence");
            Row row{canonicalize(seq, params.l_min, params.l_max), std::stoll(cols[2]), kInfeasible};
            if (row.freq < 1) throw ParseError(line_no, "frequency must be positive");
            if (cols.size() == 4 && !cols[3].empty()) row.best = std::stoll(cols[3]);
            rows.push_back(std::move(row));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    // Rebuild by replaying each pattern's increments in rank order of the dump;
    // the relative order of equal-frequency rows is preserved.
    PatternPool pool(params);
    std::unordered_set<Pattern, PatternHash> seen;
    for (const auto& r : rows) {
        if (!seen.insert(r.p).second) throw std::runtime_error("duplicate pattern in pool dump");
        for (std::int64_t k = 0; k < r.freq; ++k) pool.record(r.p, r.best);
    }
    return pool;
}

}  // namespace pils
