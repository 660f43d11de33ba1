#include "pils/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace pils {

Cost rounded_distance(const Point& a, const Point& b) {
    return static_cast<Cost>(std::lround(std::hypot(a.x - b.x, a.y - b.y)));
}

std::optional<int> vehicle_hint_from_name(const std::string& name) {
    static const std::regex kPattern(R"(-k(\d+))");
    std::smatch m;
    if (std::regex_search(name, m, kPattern)) return std::stoi(m[1].str());
    return std::nullopt;
}

Instance::Instance(std::string name, std::vector<Point> coords, std::vector<Load> demand,
                   Load capacity, std::optional<int> vehicle_hint)
    : name_(std::move(name)),
      n_(static_cast<int>(coords.size()) - 1),
      coords_(std::move(coords)),
      demand_(std::move(demand)),
      capacity_(capacity),
      vehicle_hint_(vehicle_hint) {
    if (n_ < 1) throw std::invalid_argument("instance needs at least one customer");
    if (demand_.size() != coords_.size())
        throw std::invalid_argument("demand and coordinate counts differ");
    if (capacity_ <= 0) throw std::invalid_argument("capacity must be positive");
    if (demand_[0] != 0) throw std::invalid_argument("depot demand must be zero");
    for (int i = 0; i <= n_; ++i) {
        if (!std::isfinite(coords_[i].x) || !std::isfinite(coords_[i].y))
            throw std::invalid_argument("non-finite coordinate for vertex " + std::to_string(i));
        if (demand_[i] < 0)
            throw std::invalid_argument("negative demand for vertex " + std::to_string(i));
        if (demand_[i] > capacity_)
            throw std::invalid_argument("demand exceeds capacity for vertex " + std::to_string(i));
        total_demand_ += demand_[i];
    }
    const auto size = static_cast<std::size_t>(n_ + 1);
    dist_.assign(size * size, 0);
    for (int i = 0; i <= n_; ++i) {
        for (int j = i + 1; j <= n_; ++j) {
            const Cost d = rounded_distance(coords_[i], coords_[j]);
            dist_[i * size + j] = d;
            dist_[j * size + i] = d;
            max_edge_ = std::max(max_edge_, d);
        }
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

enum class Section { Header, Coords, Demands, Depots, Done };

}  // namespace

Instance parse_instance(std::istream& in) {
    std::string name;
    int dimension = -1;
    Load capacity = -1;
    bool weight_type_seen = false;
    std::map<int, Point> coords;
    std::map<int, Load> demands;
    std::vector<int> depots;

    Section section = Section::Header;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line == "EOF") break;

        if (line.rfind("NODE_COORD_SECTION", 0) == 0) {
            section = Section::Coords;
            continue;
        }
        if (line.rfind("DEMAND_SECTION", 0) == 0) {
            section = Section::Demands;
            continue;
        }
        if (line.rfind("DEPOT_SECTION", 0) == 0) {
            section = Section::Depots;
            continue;
        }

        const auto colon = line.find(':');
        if (colon != std::string::npos) {
            const std::string key = trim(line.substr(0, colon));
            std::string value = trim(line.substr(colon + 1));
            section = Section::Header;
            if (key == "NAME") {
                name = value;
            } else if (key == "DIMENSION") {
                try {
                    dimension = std::stoi(value);
                } catch (const std::exception&) {
                    throw ParseError(line_no, "malformed DIMENSION '" + value + "'");
                }
            } else if (key == "CAPACITY") {
                try {
                    capacity = std::stoll(value);
                } catch (const std::exception&) {
                    throw ParseError(line_no, "malformed CAPACITY '" + value + "'");
                }
            } else if (key == "EDGE_WEIGHT_TYPE") {
                if (value != "EUC_2D")
                    throw UnsupportedFormat("unsupported EDGE_WEIGHT_TYPE '" + value + "'");
                weight_type_seen = true;
            } else if (key == "TYPE") {
                if (value != "CVRP") throw UnsupportedFormat("unsupported TYPE '" + value + "'");
            }
            // COMMENT and unknown header keys are ignored.
            continue;
        }

        std::istringstream fields(line);
        switch (section) {
            case Section::Coords: {
                int id;
                double x, y;
                if (!(fields >> id >> x >> y)) throw ParseError(line_no, "malformed coordinate line");
                coords[id] = Point{x, y};
                break;
            }
            case Section::Demands: {
                int id;
                Load q;
                if (!(fields >> id >> q)) throw ParseError(line_no, "malformed demand line");
                demands[id] = q;
                break;
            }
            case Section::Depots: {
                int id;
                if (!(fields >> id)) throw ParseError(line_no, "malformed depot line");
                if (id == -1) {
                    section = Section::Done;
                } else {
                    depots.push_back(id);
                }
                break;
            }
            case Section::Done:
                break;
            case Section::Header:
                throw ParseError(line_no, "unexpected line outside of any section: '" + line + "'");
        }
    }

    if (dimension < 2) throw ParseError(line_no, "missing or invalid DIMENSION");
    if (capacity <= 0) throw ParseError(line_no, "missing or invalid CAPACITY");
    if (!weight_type_seen) throw UnsupportedFormat("missing EDGE_WEIGHT_TYPE (only EUC_2D supported)");
    if (static_cast<int>(coords.size()) != dimension)
        throw ParseError(line_no, "expected " + std::to_string(dimension) + " coordinates, found " +
                                      std::to_string(coords.size()));
    if (static_cast<int>(demands.size()) != dimension)
        throw ParseError(line_no, "expected " + std::to_string(dimension) + " demands, found " +
                                      std::to_string(demands.size()));
    if (depots.size() > 1) throw UnsupportedFormat("multiple depots are not supported");
    const int depot_id = depots.empty() ? coords.begin()->first : depots.front();
    if (!coords.count(depot_id)) throw ParseError(line_no, "depot id not among coordinates");
    if (demands.count(depot_id) && demands[depot_id] != 0)
        throw ParseError(line_no, "depot has nonzero demand");

    std::vector<Point> pts;
    std::vector<Load> q;
    pts.reserve(dimension);
    q.reserve(dimension);
    pts.push_back(coords[depot_id]);
    q.push_back(0);
    for (const auto& [id, p] : coords) {
        if (id == depot_id) continue;
        if (!demands.count(id))
            throw ParseError(line_no, "missing demand for node " + std::to_string(id));
        pts.push_back(p);
        q.push_back(demands[id]);
    }
    try {
        return Instance(name, std::move(pts), std::move(q), capacity, vehicle_hint_from_name(name));
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
    }
}

Instance parse_instance_text(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
    return parse_instance(in);
}

}  // namespace pils
