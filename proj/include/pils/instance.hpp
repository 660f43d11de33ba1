#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pils {

using Cost = std::int64_t;
using Load = std::int64_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

  private:
    int line_;
};

class UnsupportedFormat : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Immutable CVRP data. Vertex 0 is the depot, customers are 1..n.
// Distances are rounded Euclidean and precomputed into a dense matrix.
class Instance {
  public:
    Instance(std::string name, std::vector<Point> coords, std::vector<Load> demand, Load capacity,
             std::optional<int> vehicle_hint = std::nullopt);

    const std::string& name() const noexcept { return name_; }
    int n() const noexcept { return n_; }
    int vertex_count() const noexcept { return n_ + 1; }
    Load capacity() const noexcept { return capacity_; }
    Load demand(int i) const { return demand_[i]; }
    const Point& coord(int i) const { return coords_[i]; }
    std::optional<int> vehicle_hint() const noexcept { return vehicle_hint_; }
    Load total_demand() const noexcept { return total_demand_; }
    Cost max_edge() const noexcept { return max_edge_; }

    Cost distance(int i, int j) const { return dist_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }

  private:
    std::string name_;
    int n_;
    std::vector<Point> coords_;
    std::vector<Load> demand_;
    Load capacity_;
    std::optional<int> vehicle_hint_;
    Load total_demand_ = 0;
    Cost max_edge_ = 0;
    std::vector<Cost> dist_;
};

// Nearest-integer Euclidean distance (CVRPLIB convention).
Cost rounded_distance(const Point& a, const Point& b);

// Route-count hint from names like "X-n101-k25".
std::optional<int> vehicle_hint_from_name(const std::string& name);

// TSPLIB subset: NAME, DIMENSION, CAPACITY, EDGE_WEIGHT_TYPE EUC_2D,
// NODE_COORD_SECTION, DEMAND_SECTION, DEPOT_SECTION.
Instance parse_instance(std::istream& in);
Instance parse_instance_text(const std::string& text);
Instance load_instance(const std::string& path);

}  // namespace pils
