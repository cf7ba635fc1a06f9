#include "plap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "plap/csv.hpp"

namespace plap {

double EdgeKernel::operator()(double z) const {
    if (z < 0.0) z = -z;
    switch (type) {
        case Type::Indicator:
            return z <= 1.0 ? 1.0 : 0.0;
        case Type::Gaussian:
            return z > z_cut ? 0.0 : std::exp(-0.5 * z * z);
    }
    return 0.0;
}

double EdgeKernel::support_radius() const {
    return type == Type::Indicator ? 1.0 : z_cut;
}

std::string EdgeKernel::name() const {
    return type == Type::Indicator ? "indicator" : "gaussian";
}

namespace {

double dist2(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

}  // namespace

GeometricGraph build_graph(std::vector<Point> points, EdgeKernel kernel, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("build_graph: bandwidth must be positive");
    if (points.size() < 2) throw std::invalid_argument("build_graph: need at least 2 points");
    const std::size_t n = points.size();
    const std::size_t d = points[0].size();
    for (const Point& p : points)
        if (p.size() != d) throw std::invalid_argument("build_graph: point dimensions differ");

    GeometricGraph g;
    g.h = h;
    g.kernel = kernel;
    const double radius = h * kernel.support_radius();
    const double r2 = radius * radius;

    auto add_edge = [&](std::size_t i, std::size_t j) {
        const double d2 = dist2(points[i], points[j]);
        if (d2 > r2) return;
        const double w = kernel(std::sqrt(d2) / h);
        if (w > 0.0)
            g.edges.push_back(Edge{static_cast<std::uint32_t>(std::min(i, j)),
                                   static_cast<std::uint32_t>(std::max(i, j)), w});
    };

    if (n <= 2000) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) add_edge(i, j);
    } else {
        // cell-grid bucketing: cell size = interaction radius, scan half the
        // neighbor stencil so each pair is visited once
        std::map<std::vector<long>, std::vector<std::uint32_t>> cells;
        std::vector<std::vector<long>> key_of(n, std::vector<long>(d));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k)
                key_of[i][k] = static_cast<long>(std::floor(points[i][k] / radius));
            cells[key_of[i]].push_back(static_cast<std::uint32_t>(i));
        }
        std::vector<std::vector<long>> offsets;
        {
            std::vector<long> off(d, -1);
            while (true) {
                bool keep = false;  // keep offsets that are lexicographically > 0, plus 0 itself
                for (std::size_t k = d; k-- > 0;) {
                    if (off[k] != 0) {
                        keep = off[k] > 0 ? true : false;
                        break;
                    }
                }
                bool is_zero = std::all_of(off.begin(), off.end(), [](long v) { return v == 0; });
                if (keep || is_zero) offsets.push_back(off);
                std::size_t k = 0;
                for (; k < d; ++k) {
                    if (++off[k] <= 1) break;
                    off[k] = -1;
                }
                if (k == d) break;
            }
        }
        std::vector<long> nb(d);
        for (const auto& [key, members] : cells) {
            for (const auto& off : offsets) {
                for (std::size_t k = 0; k < d; ++k) nb[k] = key[k] + off[k];
                const bool same = nb == key;
                auto it = same ? cells.find(key) : cells.find(nb);
                if (it == cells.end()) continue;
                const auto& other = it->second;
                for (std::size_t a = 0; a < members.size(); ++a) {
                    const std::size_t b0 = same ? a + 1 : 0;
                    for (std::size_t b = b0; b < other.size(); ++b) add_edge(members[a], other[b]);
                }
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    g.points = std::move(points);
    return g;
}

double j_p(const GeometricGraph& g, const VertexFunction& f, int p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("j_p: p must be an even integer >= 2");
    if (f.size() != g.num_vertices()) throw std::invalid_argument("j_p: vertex function size mismatch");
    double s = 0.0;
    for (const Edge& e : g.edges) {
        const double t = e.w * std::abs(f[e.i] - f[e.j]);
        s += std::pow(t, p);
    }
    return s;
}

double scaled_jp(const GeometricGraph& g, const VertexFunction& f, int p) {
    // The limit objective is an ordered-pair U-statistic; the stored edge
    // list holds each pair once, hence the factor 2.
    const double n = static_cast<double>(g.num_vertices());
    return 2.0 * j_p(g, f, p) / (n * n * std::pow(g.h, p + g.dim()));
}

double scaled_degree(const GeometricGraph& g, std::uint32_t vertex) {
    if (vertex >= g.num_vertices()) throw std::invalid_argument("scaled_degree: vertex out of range");
    double s = 0.0;
    for (const Edge& e : g.edges) {
        if (e.i == vertex || e.j == vertex) s += e.w;
    }
    const double n = static_cast<double>(g.num_vertices());
    return s / (n * std::pow(g.h, g.dim()));
}

void export_graph_csv(const GeometricGraph& g, const std::string& csv_path,
                      const std::string& header_json_path) {
    CsvWriter csv(csv_path);
    csv.row({"i", "j", "w"});
    for (const Edge& e : g.edges)
        csv.row_values(static_cast<double>(e.i), static_cast<double>(e.j), e.w);
    csv.close();

    nlohmann::json j;
    j["n"] = g.num_vertices();
    j["d"] = g.dim();
    j["h"] = g.h;
    j["kernel"] = g.kernel.name();
    j["z_cut"] = g.kernel.z_cut;
    std::ofstream out(header_json_path);
    if (!out) throw std::runtime_error("export_graph_csv: cannot open " + header_json_path);
    out << j.dump(2) << "\n";
}

void export_points_csv(const std::vector<Point>& pts, const std::string& path) {
    CsvWriter csv(path);
    for (const Point& p : pts) {
        std::vector<std::string> row;
        row.reserve(p.size());
        for (double v : p) row.push_back(format_double(v));
        csv.row(row);
    }
    csv.close();
}

std::vector<Point> import_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("import_points_csv: cannot open " + path);
    std::vector<Point> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Point p;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) p.push_back(std::stod(field));
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace plap
