#include "gwg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gwg
{

DofMap::DofMap(const Mesh& mesh, const SpaceConfig& config)
  : _mesh(&mesh),
    _dk(poly_dim(config.k)),
    _dj(edge_poly_dim(config.j)),
    _dn(poly_dim(config.n)),
    _trace_offset(static_cast<Eigen::Index>(mesh.n_elements()) * 2 * _dk),
    _n_velocity(_trace_offset + static_cast<Eigen::Index>(mesh.n_edges()) * 2 * _dj),
    _n_pressure(static_cast<Eigen::Index>(mesh.n_elements()) * _dn)
{
  for (std::size_t e : mesh.boundary_edges()) {
    for (int c = 0; c < 2; ++c) {
      for (int a = 0; a < _dj; ++a) {
        _boundary_dofs.push_back(trace(e, c, a));
      }
    }
  }
  std::sort(_boundary_dofs.begin(), _boundary_dofs.end());
}

std::vector<Eigen::Index> DofMap::element_velocity_dofs(std::size_t t) const
{
  std::vector<Eigen::Index> dofs;
  dofs.reserve(2 * _dk + 6 * _dj);
  for (int c = 0; c < 2; ++c) {
    for (int b = 0; b < _dk; ++b) {
      dofs.push_back(interior(t, c, b));
    }
  }
  for (std::size_t e : _mesh->element_edges(t)) {
    for (int c = 0; c < 2; ++c) {
      for (int a = 0; a < _dj; ++a) {
        dofs.push_back(trace(e, c, a));
      }
    }
  }
  return dofs;
}

std::vector<Eigen::Index> DofMap::element_pressure_dofs(std::size_t t) const
{
  std::vector<Eigen::Index> dofs(_dn);
  for (int r = 0; r < _dn; ++r) {
    dofs[r] = pressure(t, r);
  }
  return dofs;
}

Eigen::MatrixX2d WeakVelocity::interior(const DofMap& dofs, std::size_t t) const
{
  Eigen::MatrixX2d c(dofs.dim_interior(), 2);
  for (int i = 0; i < 2; ++i) {
    c.col(i) = coefficients.segment(dofs.interior(t, i, 0), dofs.dim_interior());
  }
  return c;
}

Eigen::MatrixX2d WeakVelocity::trace(const DofMap& dofs, std::size_t e) const
{
  Eigen::MatrixX2d c(dofs.dim_trace(), 2);
  for (int i = 0; i < 2; ++i) {
    c.col(i) = coefficients.segment(dofs.trace(e, i, 0), dofs.dim_trace());
  }
  return c;
}

Eigen::VectorXd WeakVelocity::local(const DofMap& dofs, std::size_t t) const
{
  const std::vector<Eigen::Index> idx = dofs.element_velocity_dofs(t);
  Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = coefficients[idx[i]];
  }
  return v;
}

WeakVelocity interpolate_weak(const VectorFn& w, const Mesh& mesh, const SpaceConfig& config)
{
  const DofMap dofs(mesh, config);
  const int order = config.effective_quadrature_order();
  WeakVelocity v{Eigen::VectorXd::Zero(dofs.n_velocity())};
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const Eigen::MatrixX2d c = project_interior(w, mesh, t, config.k, order);
    for (int i = 0; i < 2; ++i) {
      v.coefficients.segment(dofs.interior(t, i, 0), dofs.dim_interior()) = c.col(i);
    }
  }
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const Eigen::MatrixX2d c = project_edge(w, mesh, e, config.j, order);
    for (int i = 0; i < 2; ++i) {
      v.coefficients.segment(dofs.trace(e, i, 0), dofs.dim_trace()) = c.col(i);
    }
  }
  return v;
}

PressureField project_pressure(const ScalarFn& p, const Mesh& mesh, const SpaceConfig& config)
{
  const int dn = poly_dim(config.n);
  const int order = config.effective_quadrature_order();
  PressureField out{Eigen::VectorXd(static_cast<Eigen::Index>(mesh.n_elements()) * dn)};
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    out.coefficients.segment(static_cast<Eigen::Index>(t) * dn, dn) = project_interior(p, mesh, t, config.n, order);
  }
  return out;
}

Form parse_form(const std::string& name)
{
  if (name == "viscous") return Form::viscous;
  if (name == "convection") return Form::convection;
  if (name == "s1") return Form::s1;
  if (name == "s2") return Form::s2;
  if (name == "divergence") return Form::divergence;
  if (name == "mass") return Form::mass;
  throw std::invalid_argument("unknown bilinear form '" + name + "'");
}

namespace
{

struct FormMask
{
  bool viscous = false, convection = false, s1 = false, mass = false, divergence = false, s2 = false;
};

struct ElementContribution
{
  Eigen::MatrixXd viscous, convection, s1, mass, divergence;
};

ElementContribution compute_element(const LocalElement& el, const SpaceConfig& config, const FormMask& mask,
                                    const VectorFn* beta)
{
  const int nloc = el.layout().size();
  ElementContribution out;
  if (mask.viscous) out.viscous = Eigen::MatrixXd::Zero(nloc, nloc);
  if (mask.convection) out.convection = Eigen::MatrixXd::Zero(nloc, nloc);
  if (mask.mass) out.mass = Eigen::MatrixXd::Zero(nloc, nloc);
  if (mask.divergence) out.divergence = Eigen::MatrixXd::Zero(el.pressure_basis().size(), nloc);

  for (std::size_t q = 0; q < el.n_quad(); ++q) {
    const double w = el.quad_weight(q);
    if (mask.viscous || mask.convection) {
      const auto grad = el.weak_gradient_at(q);
      if (mask.viscous) {
        out.viscous.noalias() += w * grad.transpose() * grad;
      }
      if (mask.convection) {
        const Eigen::Vector2d b = (*beta)(el.quad_point(q));
        Eigen::Matrix<double, 2, Eigen::Dynamic> advected(2, nloc);
        for (int i = 0; i < 2; ++i) {
          advected.row(i) = b[0] * grad.row(2 * i) + b[1] * grad.row(2 * i + 1);
        }
        out.convection.noalias() += w * el.interior_values_at(q).transpose() * advected;
      }
    }
    if (mask.mass) {
      const auto v0 = el.interior_values_at(q);
      out.mass.noalias() += w * v0.transpose() * v0;
    }
    if (mask.divergence) {
      out.divergence.noalias() +=
        w * el.pressure_values().row(static_cast<Eigen::Index>(q)).transpose() * el.weak_divergence_at(q);
    }
  }
  if (mask.viscous) out.viscous *= config.mu;
  if (mask.convection) out.convection *= config.rho;
  if (mask.mass) out.mass *= config.rho;

  if (mask.s1) {
    out.s1 = Eigen::MatrixXd::Zero(nloc, nloc);
    const int dj = el.layout().dim_trace;
    Eigen::VectorXd edge_mass(2 * dj);
    for (int le = 0; le < 3; ++le) {
      const double len = el.edge(le).length;
      for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < dj; ++a) {
          edge_mass[i * dj + a] = len / (2.0 * a + 1.0);
        }
      }
      const Eigen::MatrixXd& mis = el.trace_mismatch(le);
      out.s1.noalias() += mis.transpose() * edge_mass.asDiagonal() * mis;
    }
    out.s1 *= config.zeta * std::pow(el.diameter(), config.gamma);
  }
  return out;
}

// Computes per-element results concurrently in fixed-size chunks and hands
// them to `merge` strictly in element order.
template <class Result, class Compute, class Merge>
void element_pass(std::size_t n_elements, unsigned workers, Compute compute, Merge merge)
{
  constexpr std::size_t chunk = 1024;
  workers = std::max(1u, workers);
  std::vector<Result> results;
  for (std::size_t begin = 0; begin < n_elements; begin += chunk) {
    const std::size_t end = std::min(n_elements, begin + chunk);
    results.assign(end - begin, Result{});
    if (workers == 1) {
      for (std::size_t t = begin; t < end; ++t) {
        results[t - begin] = compute(t);
      }
    } else {
      std::vector<std::jthread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t t = begin + w; t < end; t += workers) {
              results[t - begin] = compute(t);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      pool.clear();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t t = begin; t < end; ++t) {
      merge(t, results[t - begin]);
    }
  }
}

void scatter(std::vector<Triplet>& triplets, const std::vector<Eigen::Index>& rows,
             const std::vector<Eigen::Index>& cols, const Eigen::MatrixXd& local)
{
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double v = local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v != 0.0) {
        triplets.emplace_back(rows[r], cols[c], v);
      }
    }
  }
}

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& triplets)
{
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

SparseMatrix assemble_s2(const Mesh& mesh, const SpaceConfig& config, const DofMap& dofs)
{
  std::vector<Triplet> triplets;
  if (config.sigma != 0) {
    const QuadRule& rule = edge_quadrature(config.effective_quadrature_order());
    const int dn = dofs.dim_pressure();
    for (const Edge& e : mesh.edges()) {
      if (e.is_boundary()) {
        continue;
      }
      const ScaledMonomialBasis owner = element_basis(mesh, e.owner, config.n);
      const ScaledMonomialBasis neighbor = element_basis(mesh, e.neighbor, config.n);
      const Point a = mesh.vertices()[e.vertices[0]];
      const Point b = mesh.vertices()[e.vertices[1]];
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * dn, 2 * dn);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = a + rule.points[q].x() * (b - a);
        Eigen::VectorXd jump(2 * dn);
        jump << owner.values(x), -neighbor.values(x);
        local.noalias() += rule.weights[q] * e.length * jump * jump.transpose();
      }
      local *= static_cast<double>(config.sigma) * std::pow(e.length, config.alpha);
      std::vector<Eigen::Index> idx;
      for (int r = 0; r < dn; ++r) idx.push_back(dofs.pressure(e.owner, r) - dofs.n_velocity());
      for (int r = 0; r < dn; ++r) idx.push_back(dofs.pressure(e.neighbor, r) - dofs.n_velocity());
      scatter(triplets, idx, idx, local);
    }
  }
  return from_triplets(dofs.n_pressure(), dofs.n_pressure(), triplets);
}

OseenBlocks assemble_masked(const Mesh& mesh, const SpaceConfig& config, const VectorFn* beta, const FormMask& mask,
                            const AssemblyOptions& options)
{
  config.validate_parameters();
  if (mask.convection && beta == nullptr) {
    throw std::invalid_argument("assemble: the convection form requires a beta field");
  }
  const DofMap dofs(mesh, config);
  std::vector<Triplet> tv, tc, ts, tm, tb;
  element_pass<ElementContribution>(
    mesh.n_elements(), options.workers,
    [&](std::size_t t) { return compute_element(LocalElement(mesh, t, config), config, mask, beta); },
    [&](std::size_t t, const ElementContribution& c) {
      const std::vector<Eigen::Index> vdofs = dofs.element_velocity_dofs(t);
      if (mask.viscous) scatter(tv, vdofs, vdofs, c.viscous);
      if (mask.convection) scatter(tc, vdofs, vdofs, c.convection);
      if (mask.s1) scatter(ts, vdofs, vdofs, c.s1);
      if (mask.mass) scatter(tm, vdofs, vdofs, c.mass);
      if (mask.divergence) {
        std::vector<Eigen::Index> pdofs = dofs.element_pressure_dofs(t);
        for (auto& p : pdofs) p -= dofs.n_velocity();
        scatter(tb, pdofs, vdofs, c.divergence);
      }
    });
  const Eigen::Index nv = dofs.n_velocity();
  OseenBlocks blocks;
  if (mask.viscous) blocks.viscous = from_triplets(nv, nv, tv);
  if (mask.convection) blocks.convection = from_triplets(nv, nv, tc);
  if (mask.s1) blocks.s1 = from_triplets(nv, nv, ts);
  if (mask.mass) blocks.mass = from_triplets(nv, nv, tm);
  if (mask.divergence) blocks.divergence = from_triplets(dofs.n_pressure(), nv, tb);
  if (mask.s2) blocks.s2 = assemble_s2(mesh, config, dofs);
  return blocks;
}

} // namespace

SparseMatrix assemble_bilinear(Form form, const Mesh& mesh, const SpaceConfig& config, const VectorFn* beta,
                               const AssemblyOptions& options)
{
  FormMask mask;
  switch (form) {
  case Form::viscous:
    mask.viscous = true;
    return assemble_masked(mesh, config, beta, mask, options).viscous;
  case Form::convection:
    mask.convection = true;
    return assemble_masked(mesh, config, beta, mask, options).convection;
  case Form::s1:
    mask.s1 = true;
    return assemble_masked(mesh, config, beta, mask, options).s1;
  case Form::mass:
    mask.mass = true;
    return assemble_masked(mesh, config, beta, mask, options).mass;
  case Form::divergence:
    mask.divergence = true;
    return assemble_masked(mesh, config, beta, mask, options).divergence;
  case Form::s2:
    config.validate_parameters();
    return assemble_s2(mesh, config, DofMap(mesh, config));
  }
  throw std::invalid_argument("assemble_bilinear: unknown form");
}

OseenBlocks assemble_blocks(const Mesh& mesh, const SpaceConfig& config, const VectorFn& beta,
                            const AssemblyOptions& options)
{
  const FormMask all{true, true, true, true, true, true};
  return assemble_masked(mesh, config, &beta, all, options);
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const SpaceConfig& config, const VectorFn& f,
                              const AssemblyOptions& options)
{
  const DofMap dofs(mesh, config);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.n_total());
  const int dk = dofs.dim_interior();
  element_pass<Eigen::MatrixX2d>(
    mesh.n_elements(), options.workers,
    [&](std::size_t t) {
      const ScaledMonomialBasis basis = element_basis(mesh, t, config.k);
      const QuadRule& rule = triangle_quadrature(config.effective_quadrature_order());
      const double jac = 2.0 * mesh.element_area(t);
      Eigen::MatrixX2d local = Eigen::MatrixX2d::Zero(dk, 2);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = map_to_element(mesh, t, rule.points[q]);
        local.noalias() += jac * rule.weights[q] * basis.values(x) * f(x).transpose();
      }
      return local;
    },
    [&](std::size_t t, const Eigen::MatrixX2d& local) {
      for (int i = 0; i < 2; ++i) {
        load.segment(dofs.interior(t, i, 0), dk) += local.col(i);
      }
    });
  return load;
}

LoadAssembler::LoadAssembler(const Mesh& mesh, const SpaceConfig& config) : _dofs(mesh, config)
{
  const QuadRule& rule = triangle_quadrature(config.effective_quadrature_order());
  const std::size_t ne = mesh.n_elements();
  _points.resize(ne);
  _weighted.resize(ne);
  for (std::size_t t = 0; t < ne; ++t) {
    const ScaledMonomialBasis basis = element_basis(mesh, t, config.k);
    const double jac = 2.0 * mesh.element_area(t);
    _points[t].resize(rule.size());
    _weighted[t].resize(_dofs.dim_interior(), static_cast<Eigen::Index>(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_element(mesh, t, rule.points[q]);
      _points[t][q] = x;
      _weighted[t].col(static_cast<Eigen::Index>(q)) = jac * rule.weights[q] * basis.values(x);
    }
  }
}

Eigen::VectorXd LoadAssembler::assemble(const VectorFn& f) const
{
  Eigen::VectorXd load = Eigen::VectorXd::Zero(_dofs.n_total());
  const int dk = _dofs.dim_interior();
  Eigen::MatrixX2d values;
  for (std::size_t t = 0; t < _points.size(); ++t) {
    const std::vector<Point>& pts = _points[t];
    values.resize(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      values.row(static_cast<Eigen::Index>(q)) = f(pts[q]).transpose();
    }
    const Eigen::MatrixX2d local = _weighted[t] * values;
    for (int i = 0; i < 2; ++i) {
      load.segment(_dofs.interior(t, i, 0), dk) += local.col(i);
    }
  }
  return load;
}

SaddleSystem make_saddle_system(const OseenBlocks& blocks, const Eigen::VectorXd& rhs, double mass_scale)
{
  const Eigen::Index nv = blocks.viscous.rows();
  const Eigen::Index np = blocks.divergence.rows();
  SparseMatrix a = blocks.viscous + blocks.convection + blocks.s1;
  if (mass_scale != 0.0) {
    a += mass_scale * blocks.mass;
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * blocks.divergence.nonZeros() + blocks.s2.nonZeros()));
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index c = 0; c < blocks.divergence.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(blocks.divergence, c); it; ++it) {
      triplets.emplace_back(nv + it.row(), it.col(), it.value());
      triplets.emplace_back(it.col(), nv + it.row(), -it.value());
    }
  }
  for (Eigen::Index c = 0; c < blocks.s2.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(blocks.s2, c); it; ++it) {
      triplets.emplace_back(nv + it.row(), nv + it.col(), it.value());
    }
  }
  SaddleSystem system;
  system.n_velocity = nv;
  system.n_pressure = np;
  system.matrix.resize(nv + np, nv + np);
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.matrix.makeCompressed();
  system.rhs = rhs;
  return system;
}

Eigen::VectorXd dirichlet_values(const Mesh& mesh, const SpaceConfig& config, const DofMap& dofs, const VectorFn& g)
{
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dofs.n_velocity());
  const int order = config.effective_quadrature_order();
  for (std::size_t e : mesh.boundary_edges()) {
    const Eigen::MatrixX2d c = project_edge(g, mesh, e, config.j, order);
    for (int i = 0; i < 2; ++i) {
      full.segment(dofs.trace(e, i, 0), dofs.dim_trace()) = c.col(i);
    }
  }
  const auto& bdofs = dofs.boundary_dofs();
  Eigen::VectorXd values(static_cast<Eigen::Index>(bdofs.size()));
  for (std::size_t i = 0; i < bdofs.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = full[bdofs[i]];
  }
  return values;
}

SaddleSystem apply_dirichlet(SaddleSystem system, const Mesh& mesh, const SpaceConfig& config, const VectorFn& g)
{
  const DofMap dofs(mesh, config);
  if (dofs.n_total() != system.matrix.rows()) {
    throw std::invalid_argument("apply_dirichlet: system does not match mesh and configuration");
  }
  system.dirichlet_dofs = dofs.boundary_dofs();
  system.dirichlet_values = dirichlet_values(mesh, config, dofs, g);

  const Eigen::Index n = system.matrix.rows();
  std::vector<Eigen::Index> reduced_index(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> fixed_index(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < system.dirichlet_dofs.size(); ++i) {
    fixed_index[static_cast<std::size_t>(system.dirichlet_dofs[i])] = static_cast<Eigen::Index>(i);
  }
  system.free_dofs.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fixed_index[static_cast<std::size_t>(i)] < 0) {
      reduced_index[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(system.free_dofs.size());
      system.free_dofs.push_back(i);
    }
  }
  const auto n_free = static_cast<Eigen::Index>(system.free_dofs.size());
  const auto n_fixed = static_cast<Eigen::Index>(system.dirichlet_dofs.size());

  std::vector<Triplet> free_part, coupling;
  for (Eigen::Index c = 0; c < system.matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(system.matrix, c); it; ++it) {
      const Eigen::Index r = reduced_index[static_cast<std::size_t>(it.row())];
      if (r < 0) {
        continue;
      }
      const Eigen::Index rc = reduced_index[static_cast<std::size_t>(it.col())];
      if (rc >= 0) {
        free_part.emplace_back(r, rc, it.value());
      } else {
        coupling.emplace_back(r, fixed_index[static_cast<std::size_t>(it.col())], it.value());
      }
    }
  }
  system.reduced_matrix = from_triplets(n_free, n_free, free_part);
  system.dirichlet_coupling = from_triplets(n_free, n_fixed, coupling);
  system.mean_constrained = false;
  system.reduced_rhs = reduce_rhs(system, system.rhs, system.dirichlet_values);
  // Dirichlet unknowns are traces, so the interiors keep their leading positions.
  system.interior_unknowns = dofs.n_interior();
  system.interior_block = 2 * dofs.dim_interior();
  return system;
}

Eigen::VectorXd reduce_rhs(const SaddleSystem& system, const Eigen::VectorXd& full_rhs, const Eigen::VectorXd& dirichlet)
{
  const auto n_free = static_cast<Eigen::Index>(system.free_dofs.size());
  Eigen::VectorXd r(n_free + (system.mean_constrained ? 1 : 0));
  for (Eigen::Index i = 0; i < n_free; ++i) {
    r[i] = full_rhs[system.free_dofs[static_cast<std::size_t>(i)]];
  }
  r.head(n_free) -= system.dirichlet_coupling * dirichlet;
  if (system.mean_constrained) {
    r[n_free] = 0.0;
  }
  return r;
}

Eigen::VectorXd pressure_mean_row(const Mesh& mesh, const SpaceConfig& config)
{
  const int dn = poly_dim(config.n);
  const QuadRule& rule = triangle_quadrature(std::max(1, config.n));
  Eigen::VectorXd row(static_cast<Eigen::Index>(mesh.n_elements()) * dn);
  for (std::size_t t = 0; t < mesh.n_elements(); ++t) {
    const ScaledMonomialBasis basis = element_basis(mesh, t, config.n);
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(dn);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      integral += 2.0 * mesh.element_area(t) * rule.weights[q] * basis.values(map_to_element(mesh, t, rule.points[q]));
    }
    row.segment(static_cast<Eigen::Index>(t) * dn, dn) = integral;
  }
  return row;
}

SaddleSystem constrain_system(SaddleSystem system, const Mesh& mesh, const SpaceConfig& config)
{
  if (system.mean_constrained) {
    return system;
  }
  if (system.free_dofs.empty() && system.matrix.rows() > 0) {
    throw std::invalid_argument("constrain_system: apply Dirichlet conditions first");
  }
  system.mean_row = pressure_mean_row(mesh, config);
  const Eigen::Index n_free = system.reduced_matrix.rows();
  const Eigen::Index last = n_free;

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(system.reduced_matrix.nonZeros() + 2 * system.n_pressure));
  for (Eigen::Index c = 0; c < system.reduced_matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(system.reduced_matrix, c); it; ++it) {
      triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  // Pressure unknowns are never eliminated, so they occupy the tail of the reduced ordering.
  const Eigen::Index p0 = n_free - system.n_pressure;
  for (Eigen::Index i = 0; i < system.n_pressure; ++i) {
    const double v = system.mean_row[i];
    triplets.emplace_back(last, p0 + i, v);
    triplets.emplace_back(p0 + i, last, v);
  }
  system.reduced_matrix = from_triplets(n_free + 1, n_free + 1, triplets);
  Eigen::VectorXd rhs(n_free + 1);
  rhs << system.reduced_rhs.head(n_free), 0.0;
  system.reduced_rhs = rhs;
  system.mean_constrained = true;
  return system;
}

Eigen::VectorXd expand_solution(const SaddleSystem& system, const Eigen::VectorXd& reduced,
                                const Eigen::VectorXd* dirichlet)
{
  const Eigen::VectorXd& values = dirichlet != nullptr ? *dirichlet : system.dirichlet_values;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(system.matrix.rows());
  for (std::size_t i = 0; i < system.free_dofs.size(); ++i) {
    full[system.free_dofs[i]] = reduced[static_cast<Eigen::Index>(i)];
  }
  for (std::size_t i = 0; i < system.dirichlet_dofs.size(); ++i) {
    full[system.dirichlet_dofs[i]] = values[static_cast<Eigen::Index>(i)];
  }
  return full;
}

} // namespace gwg
