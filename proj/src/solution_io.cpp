#include "pils/solution_io.hpp"

#include <fstream>
#include <sstream>

namespace pils {

void write_solution(const Solution& sol, std::ostream& out) {
    int k = 0;
    for (const auto& r : sol.routes) {
        if (r.empty()) continue;
        out << "Route #" << ++k << ":";
        for (int c : r.customers) out << ' ' << c;
        out << '\n';
    }
    out << "Cost " << sol.total_distance() << '\n';
}

void save_solution(const Solution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write solution file '" + path + "'");
    write_solution(sol, out);
}

Solution parse_solution(std::istream& in, const Instance& inst) {
    std::vector<std::vector<int>> routes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.rfind("Route", 0) == 0) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) throw ParseError(line_no, "route line without ':'");
            std::istringstream fields(line.substr(colon + 1));
            std::vector<int> route;
            std::string tok;
            while (fields >> tok) {
                int c;
                try {
                    std::size_t used = 0;
                    c = std::stoi(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw ParseError(line_no, "malformed customer id '" + tok + "'");
                }
                if (c < 1 || c > inst.n())
                    throw ParseError(line_no, "unknown customer id " + std::to_string(c));
                route.push_back(c);
            }
            if (!route.empty()) routes.push_back(std::move(route));
        } else if (line.rfind("Cost", 0) == 0) {
            continue;
        } else {
            throw ParseError(line_no, "unexpected line in solution file");
        }
    }
    return Solution::from_routes(inst, routes);
}

Solution parse_solution_text(const std::string& text, const Instance& inst) {
    std::istringstream in(text);
    return parse_solution(in, inst);
}

Solution load_solution(const std::string& path, const Instance& inst) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open solution file '" + path + "'");
    return parse_solution(in, inst);
}

BksTable parse_bks(std::istream& in) {
    BksTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(line_no, "expected 'instance,bks'");
        const std::string name = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        if (line_no == 1 && name == "instance") continue;
        try {
            table[name] = std::stoll(value);
        } catch (const std::exception&) {
            throw ParseError(line_no, "malformed BKS value '" + value + "'");
        }
    }
    return table;
}

BksTable load_bks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open BKS table '" + path + "'");
    return parse_bks(in);
}

}  // namespace pils
