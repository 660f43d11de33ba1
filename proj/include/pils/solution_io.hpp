#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "pils/solution.hpp"

namespace pils {

// CVRPLIB text convention: "Route #k: c1 c2 ... ck" per non-empty route, then
// "Cost <integer>" with the total travel distance.
void write_solution(const Solution& sol, std::ostream& out);
void save_solution(const Solution& sol, const std::string& path);

// Throws ParseError on malformed lines or unknown customer ids. Caches are
// recomputed from the instance.
Solution parse_solution(std::istream& in, const Instance& inst);
Solution parse_solution_text(const std::string& text, const Instance& inst);
Solution load_solution(const std::string& path, const Instance& inst);

// "instance,bks" table.
using BksTable = std::map<std::string, Cost>;
BksTable load_bks(const std::string& path);
BksTable parse_bks(std::istream& in);

}  // namespace pils
