#pragma once

#include "glv/geometry.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace glv {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using EdgeList = Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Conforming P1 triangulation with a positively oriented boundary cycle.
///
/// Immutable after construction. Per-triangle areas and shape-function
/// gradients are cached, as are the lumped mass and the trapezoidal
/// arclength weights of the boundary vertices.
class Mesh {
 public:
  Mesh() = default;

  /// `boundary_cycle` lists boundary vertices counterclockwise; edge k joins
  /// boundary_cycle[k] and boundary_cycle[k+1 mod B]. `boundary_param` holds
  /// the curve parameter of each cycle vertex. `domain` supplies exact
  /// arclength factors; pass nullptr to use chord lengths (annulus test
  /// meshes whose boundary is not a DomainSpec curve).
  static Mesh build(Points vertices, Triangles triangles, Eigen::VectorXi boundary_cycle,
                    Eigen::VectorXd boundary_param, double h, const DomainSpec* domain);

  const Points& vertices() const { return vertices_; }
  const Triangles& triangles() const { return triangles_; }
  const Eigen::VectorXi& boundary_cycle() const { return boundary_cycle_; }
  const Eigen::VectorXd& boundary_param() const { return boundary_param_; }
  EdgeList boundary_edges() const;
  const EdgeList& edges() const { return edges_; }
  double h() const { return h_; }

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_triangles() const { return static_cast<int>(triangles_.rows()); }
  int num_boundary() const { return static_cast<int>(boundary_cycle_.size()); }

  Vec2 vertex(int i) const { return vertices_.row(i).transpose(); }
  double area(int tri) const { return area_(tri); }
  /// Gradient of the k-th barycentric shape function on triangle `tri`.
  Vec2 shape_gradient(int tri, int k) const {
    return {grad_(tri, 2 * k), grad_(tri, 2 * k + 1)};
  }
  const Eigen::VectorXd& lumped_mass() const { return mass_; }
  /// Position of vertex i in the boundary cycle, or -1.
  int boundary_slot(int i) const { return slot_(i); }
  /// Trapezoidal arclength weight (half the two adjacent boundary arcs).
  const Eigen::VectorXd& boundary_weight() const { return bweight_; }
  /// Arclength of boundary edge k (cycle[k] -> cycle[k+1]).
  const Eigen::VectorXd& boundary_edge_length() const { return blen_; }
  double total_area() const { return area_.sum(); }
  double max_edge_length() const;

  /// Vertex neighbours in CSR form.
  const Eigen::VectorXi& adjacency_offsets() const { return adj_offsets_; }
  const Eigen::VectorXi& adjacency() const { return adj_; }

  /// Returns a copy with every coordinate multiplied by `factor`.
  Mesh scaled(double factor) const;

 private:
  Points vertices_;
  Triangles triangles_;
  Eigen::VectorXi boundary_cycle_;
  Eigen::VectorXd boundary_param_;
  double h_ = 0.0;
  bool exact_arclength_ = false;
  DomainSpec domain_;

  Eigen::VectorXd area_;
  Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor> grad_;
  Eigen::VectorXd mass_;
  Eigen::VectorXi slot_;
  Eigen::VectorXd bweight_;
  Eigen::VectorXd blen_;
  EdgeList edges_;
  Eigen::VectorXi adj_offsets_;
  Eigen::VectorXi adj_;

  void compute_caches();
};

/// Concentric-ring triangulation of the unit disc, radially mapped onto
/// star domains. Requires 0 < h <= diam/4.
Mesh triangulate(const DomainSpec& spec, double h);

/// Ring triangulation of the annulus r_inner < |x| < r_outer. The outer
/// circle is the boundary cycle; the inner circle is a hole.
Mesh triangulate_annulus(double r_inner, double r_outer, double h);

/// Throws Error describing the first violated Mesh invariant.
void check_mesh_invariants(const Mesh& mesh, const DomainSpec& spec);

/// g at every boundary vertex, in cycle order.
Points interpolate_boundary_field(const Mesh& mesh, const BoundaryData& data);

/// Jacobian du_c/dx_j of a P1 field on one triangle.
Eigen::Matrix2d p1_jacobian(const Mesh& mesh, const VectorField& u, int tri);

/// Uniform-grid point location with barycentric evaluation of P1 fields.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  struct Hit {
    int triangle = -1;
    Eigen::Vector3d bary = Eigen::Vector3d::Zero();
    bool inside = false;
    double distance = 0.0;
  };

  /// Containing triangle, or the nearest triangle within `max_distance`
  /// (barycentric coordinates then extrapolate). std::nullopt if none.
  std::optional<Hit> locate(const Vec2& x, double max_distance) const;

  Vec2 evaluate(const VectorField& u, const Hit& hit) const;
  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  Vec2 origin_;
  double cell_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<int>> cells_;

  Eigen::Vector3d barycentric(int tri, const Vec2& x) const;
};

/// Nodal interpolation of `u` (on `from`) onto the vertices of `to`.
VectorField transfer_field(const Mesh& from, const VectorField& u, const Mesh& to);

// Snapshot text formats.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is, const DomainSpec& spec, double h = 0.0);
void write_field(std::ostream& os, const VectorField& u);
VectorField read_field(std::istream& is);

void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path, const DomainSpec& spec);
void save_field(const std::string& path, const VectorField& u);
VectorField load_field(const std::string& path);

}  // namespace glv
