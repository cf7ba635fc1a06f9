#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plap/density.hpp"

namespace plap {

/// Edge weight profile phi: bounded, nonincreasing, vanishing at infinity.
struct EdgeKernel {
    enum class Type { Indicator, Gaussian };

    Type type = Type::Indicator;
    double z_cut = 3.0;  ///< Gaussian truncation radius (weights are 0 past it)

    double operator()(double z) const;
    /// Radius beyond which phi is identically zero.
    double support_radius() const;
    std::string name() const;
};

inline EdgeKernel indicator_kernel() { return EdgeKernel{EdgeKernel::Type::Indicator, 3.0}; }
inline EdgeKernel gaussian_kernel(double z_cut = 3.0) {
    return EdgeKernel{EdgeKernel::Type::Gaussian, z_cut};
}

struct Edge {
    std::uint32_t i, j;  ///< i < j
    double w;            ///< phi(|x_i - x_j| / h) > 0
};

/// Geometric graph over a point cloud. Immutable after construction; both
/// endpoints see the same weight by construction, pairs with phi = 0 are
/// absent, and there are no self loops.
struct GeometricGraph {
    std::vector<Point> points;
    std::vector<Edge> edges;
    double h = 1.0;
    EdgeKernel kernel;

    std::size_t num_vertices() const { return points.size(); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
};

using VertexFunction = std::vector<double>;

/// One labeled vertex.
struct Label {
    std::uint32_t vertex;
    double value;
};

/// The constraint set O with observed values; indices are distinct.
struct LabelSet {
    std::vector<Label> entries;
};

/// Connect every pair with positive kernel value. Cell-grid bucketing with
/// cell size h * support_radius; brute force for N <= 2000.
GeometricGraph build_graph(std::vector<Point> points, EdgeKernel kernel, double h);

/// J_p(f) = sum over edges of w^p |f_i - f_j|^p; p must be even and >= 2.
double j_p(const GeometricGraph& g, const VertexFunction& f, int p);

/// The normalized energy whose large-N small-h limit is C_p int |grad f|^p
/// mu^2: counts both orientations of each stored edge, divided by N^2 h^{p+d}.
double scaled_jp(const GeometricGraph& g, const VertexFunction& f, int p);

/// (1/(N h^d)) sum_j phi(|x_j - x_i|/h), self term excluded.
double scaled_degree(const GeometricGraph& g, std::uint32_t vertex);

/// Edge list as CSV rows `i,j,w` plus a JSON side-car header (N, d, h, kernel).
void export_graph_csv(const GeometricGraph& g, const std::string& csv_path,
                      const std::string& header_json_path);

/// Point cloud round trip as CSV rows of d coordinates.
void export_points_csv(const std::vector<Point>& pts, const std::string& path);
std::vector<Point> import_points_csv(const std::string& path);

}  // namespace plap
