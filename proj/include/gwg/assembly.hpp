// Global assembly of the generalized weak Galerkin Oseen system.
//
// Unknown ordering: interior velocity blocks element by element, then trace
// blocks edge by edge, then pressure blocks element by element. With the
// Dirichlet traces eliminated and the zero-mean multiplier appended the
// reduced system reads
//
//   [ A   -B^T  0 ] [u]   [F]
//   [ B    S2   c ] [p] = [0]
//   [ 0    c^T  0 ] [l]   [0]
//
// where A = mu K + rho N + S1 (+ rho/tau M for a time step).

#ifndef GWG_ASSEMBLY_HPP
#define GWG_ASSEMBLY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gwg/local_operators.hpp"
#include "gwg/mesh.hpp"
#include "gwg/space_config.hpp"

namespace gwg
{

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Global numbering of velocity and pressure unknowns.
class DofMap
{
public:
  DofMap(const Mesh& mesh, const SpaceConfig& config);

  int dim_interior() const { return _dk; }
  int dim_trace() const { return _dj; }
  int dim_pressure() const { return _dn; }

  Eigen::Index n_velocity() const { return _n_velocity; }
  Eigen::Index n_pressure() const { return _n_pressure; }
  Eigen::Index n_total() const { return _n_velocity + _n_pressure; }
  Eigen::Index n_interior() const { return _trace_offset; }

  Eigen::Index interior(std::size_t t, int component, int b) const
  {
    return static_cast<Eigen::Index>(t) * 2 * _dk + component * _dk + b;
  }
  Eigen::Index trace(std::size_t e, int component, int a) const
  {
    return _trace_offset + static_cast<Eigen::Index>(e) * 2 * _dj + component * _dj + a;
  }
  Eigen::Index pressure(std::size_t t, int r) const
  {
    return _n_velocity + static_cast<Eigen::Index>(t) * _dn + r;
  }

  /// Global indices of the local velocity DOFs of element t (LocalLayout order).
  std::vector<Eigen::Index> element_velocity_dofs(std::size_t t) const;
  std::vector<Eigen::Index> element_pressure_dofs(std::size_t t) const;

  /// Trace DOFs on boundary edges, ascending.
  const std::vector<Eigen::Index>& boundary_dofs() const { return _boundary_dofs; }

private:
  const Mesh* _mesh;
  int _dk, _dj, _dn;
  Eigen::Index _trace_offset;
  Eigen::Index _n_velocity;
  Eigen::Index _n_pressure;
  std::vector<Eigen::Index> _boundary_dofs;
};

/// Weak function (v0, v_b) stored as one coefficient vector in DofMap velocity order.
struct WeakVelocity
{
  Eigen::VectorXd coefficients;

  /// Interior coefficients of element t: column c holds component c.
  Eigen::MatrixX2d interior(const DofMap& dofs, std::size_t t) const;
  /// Trace coefficients of edge e: column c holds component c.
  Eigen::MatrixX2d trace(const DofMap& dofs, std::size_t e) const;
  /// Local DOF vector of element t in LocalLayout order.
  Eigen::VectorXd local(const DofMap& dofs, std::size_t t) const;
};

/// Per-element pressure coefficients in P_n, in DofMap pressure order (offset removed).
struct PressureField
{
  Eigen::VectorXd coefficients;

  Eigen::VectorXd local(const DofMap& dofs, std::size_t t) const
  {
    return coefficients.segment(static_cast<Eigen::Index>(t) * dofs.dim_pressure(), dofs.dim_pressure());
  }
};

/// Q_h w: Q0 on every element, Q_b on every edge.
WeakVelocity interpolate_weak(const VectorFn& w, const Mesh& mesh, const SpaceConfig& config);

/// Q_h^p p: elementwise L2 projection onto P_n.
PressureField project_pressure(const ScalarFn& p, const Mesh& mesh, const SpaceConfig& config);

enum class Form
{
  viscous,
  convection,
  s1,
  s2,
  divergence,
  mass
};

Form parse_form(const std::string& name);

struct AssemblyOptions
{
  /// Worker threads for element-local computation; results do not depend on it.
  unsigned workers = 1;
};

/// One bilinear form. Velocity forms are n_velocity x n_velocity, s2 is
/// n_pressure x n_pressure, divergence is n_pressure x n_velocity. The
/// coefficients mu, rho, zeta and sigma of `config` are applied.
SparseMatrix assemble_bilinear(Form form, const Mesh& mesh, const SpaceConfig& config,
                               const VectorFn* beta = nullptr, const AssemblyOptions& options = {});

/// All blocks, computed in one pass over the elements.
struct OseenBlocks
{
  SparseMatrix viscous;    // mu K
  SparseMatrix convection; // rho N
  SparseMatrix s1;
  SparseMatrix mass;       // rho M
  SparseMatrix divergence; // B
  SparseMatrix s2;
};

OseenBlocks assemble_blocks(const Mesh& mesh, const SpaceConfig& config, const VectorFn& beta,
                            const AssemblyOptions& options = {});

/// (f, v0) on interior velocity DOFs; length n_total with zero trace and pressure entries.
Eigen::VectorXd assemble_load(const Mesh& mesh, const SpaceConfig& config, const VectorFn& f,
                              const AssemblyOptions& options = {});

/// assemble_load with the quadrature points and weighted basis values of
/// every element precomputed, for repeated loads on one mesh.
class LoadAssembler
{
public:
  LoadAssembler(const Mesh& mesh, const SpaceConfig& config);

  Eigen::VectorXd assemble(const VectorFn& f) const;

private:
  DofMap _dofs;
  std::vector<std::vector<Point>> _points;  // per element
  std::vector<Eigen::MatrixXd> _weighted;   // per element, dim_interior x points
};

struct SaddleSystem
{
  Eigen::Index n_velocity = 0;
  Eigen::Index n_pressure = 0;

  SparseMatrix matrix; // full [[A, -B^T], [B, S2]]
  Eigen::VectorXd rhs;

  std::vector<Eigen::Index> dirichlet_dofs;
  Eigen::VectorXd dirichlet_values;

  /// Reduced unknowns: free_dofs[i] is the full index of reduced index i.
  std::vector<Eigen::Index> free_dofs;
  SparseMatrix reduced_matrix;
  SparseMatrix dirichlet_coupling; // rows of free DOFs, columns of Dirichlet DOFs
  Eigen::VectorXd reduced_rhs;
  bool mean_constrained = false;
  Eigen::VectorXd mean_row; // integral of each pressure basis function (full pressure order)

  /// Interior velocity unknowns lead the reduced ordering and couple only
  /// within their element, in blocks of `interior_block`; set by apply_dirichlet.
  Eigen::Index interior_unknowns = 0;
  Eigen::Index interior_block = 0;
};

/// Builds the full saddle matrix from blocks; `mass_scale` multiplies the mass block.
SaddleSystem make_saddle_system(const OseenBlocks& blocks, const Eigen::VectorXd& rhs, double mass_scale = 0.0);

/// Edgewise Q_b g on boundary traces.
Eigen::VectorXd dirichlet_values(const Mesh& mesh, const SpaceConfig& config, const DofMap& dofs,
                                 const VectorFn& g);

/// Eliminates boundary traces with values Q_b g; their couplings move to the right-hand side.
SaddleSystem apply_dirichlet(SaddleSystem system, const Mesh& mesh, const SpaceConfig& config, const VectorFn& g);

/// Reduced right-hand side for a new full load and new Dirichlet values (same sparsity and elimination).
Eigen::VectorXd reduce_rhs(const SaddleSystem& system, const Eigen::VectorXd& full_rhs,
                           const Eigen::VectorXd& dirichlet);

/// Appends the Lagrange multiplier enforcing a zero pressure mean.
SaddleSystem constrain_system(SaddleSystem system, const Mesh& mesh, const SpaceConfig& config);

/// Integral over each element of each pressure basis function.
Eigen::VectorXd pressure_mean_row(const Mesh& mesh, const SpaceConfig& config);

/// Expands a reduced solution (with multiplier when constrained) to the full
/// vector; `dirichlet` overrides the stored boundary values.
Eigen::VectorXd expand_solution(const SaddleSystem& system, const Eigen::VectorXd& reduced,
                                const Eigen::VectorXd* dirichlet = nullptr);

} // namespace gwg

#endif
