#include "greenlab/laplace.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace greenlab {

DiscreteFunction DiscreteFunction::zeros(const GeometryHandle& g) {
  return {&g, Eigen::VectorXcd::Zero(g.num_nodes())};
}

DiscreteFunction DiscreteFunction::sample(
    const GeometryHandle& g,
    const std::function<std::complex<double>(const Point&)>& f) {
  DiscreteFunction out = zeros(g);
  for (long i = 0; i < g.num_nodes(); ++i) out.values[i] = f(g.node(i));
  return out;
}

void DiscreteFunction::check_finite() const {
  if (!values.allFinite()) throw std::runtime_error("non-finite nodal value");
}

DiscreteFunction DiscreteFunction::real_part() const {
  DiscreteFunction out;
  out.geom = geom;
  out.values = values.real().cast<std::complex<double>>();
  return out;
}

std::complex<double> DiscreteFunction::average() const {
  std::complex<double> s = 0;
  double vol = 0;
  for (long i = 0; i < geom->num_nodes(); ++i) {
    double w = geom->node_weight(i);
    s += w * values[i];
    vol += w;
  }
  return s / vol;
}

// ---------------------------------------------------------------------------

namespace {

// barycentric gradients of a simplex, rows: local vertex, cols: edim
Eigen::MatrixXd barycentric_gradients(const Mesh& m, int c) {
  const int k = m.dim;  // simplex dimension
  Eigen::MatrixXd E(m.edim, k);
  Eigen::VectorXd p0 = m.vertices.row(m.cells(c, 0)).transpose();
  for (int i = 0; i < k; ++i)
    E.col(i) = m.vertices.row(m.cells(c, i + 1)).transpose() - p0;
  Eigen::MatrixXd G = E.transpose() * E;           // k x k Gram
  Eigen::MatrixXd D = E * G.inverse();             // edim x k
  Eigen::MatrixXd grads(k + 1, m.edim);
  for (int i = 0; i < k; ++i) grads.row(i + 1) = D.col(i).transpose();
  grads.row(0) = -grads.bottomRows(k).colwise().sum();
  return grads;
}

}  // namespace

DiscreteOperator assemble(const GeometryHandle& g) {
  DiscreteOperator op;
  op.geom = &g;
  if (g.grid) {
    op.kind = DiscreteOperator::Kind::spectral;
    op.fft = std::make_shared<GridFFT>(*g.grid);
    return op;
  }
  if (!g.mesh) throw std::runtime_error("geometry has no mesh or grid to assemble on");
  const Mesh& m = *g.mesh;
  op.kind = DiscreteOperator::Kind::fem;
  const int nv = m.num_vertices();
  const int k = m.dim + 1;

  op.grad_lambda.resize(m.num_cells());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(m.num_cells()) * k * k);
  for (int c = 0; c < m.num_cells(); ++c) {
    Eigen::MatrixXd grads = barycentric_gradients(m, c);
    op.grad_lambda[c] = grads;
    double vol = m.cell_volumes[c];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        trips.emplace_back(m.cells(c, i), m.cells(c, j),
                           vol * grads.row(i).dot(grads.row(j)));
  }
  op.stiffness.resize(nv, nv);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.lumped_mass = m.vertex_weights;

  // interior index set and Dirichlet blocks
  op.interior_pos.assign(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (!(v < static_cast<int>(m.is_boundary_vertex.size()) && m.is_boundary_vertex[v])) {
      op.interior_pos[v] = static_cast<int>(op.interior.size());
      op.interior.push_back(v);
    }
  if (!m.boundary_faces.empty()) {
    const int ni = static_cast<int>(op.interior.size());
    std::vector<Eigen::Triplet<double>> tii, tib;
    for (int col = 0; col < op.stiffness.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, col); it; ++it) {
        int r = static_cast<int>(it.row());
        int cidx = static_cast<int>(it.col());
        if (op.interior_pos[r] < 0) continue;
        if (op.interior_pos[cidx] >= 0)
          tii.emplace_back(op.interior_pos[r], op.interior_pos[cidx], it.value());
        else {
          // boundary column position: dense over boundary vertex order
          int bpos = static_cast<int>(
              std::lower_bound(m.boundary_vertices.begin(), m.boundary_vertices.end(),
                               cidx) -
              m.boundary_vertices.begin());
          tib.emplace_back(op.interior_pos[r], bpos, it.value());
        }
      }
    }
    op.K_II.resize(ni, ni);
    op.K_II.setFromTriplets(tii.begin(), tii.end());
    op.K_IB.resize(ni, static_cast<int>(m.boundary_vertices.size()));
    op.K_IB.setFromTriplets(tib.begin(), tib.end());
    op.factor = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    op.factor->compute(op.K_II);
    if (op.factor->info() != Eigen::Success)
      throw std::runtime_error("Dirichlet factorization failed");
  }
  return op;
}

Eigen::VectorXd solve_dirichlet_real(const DiscreteOperator& op,
                                     const Eigen::VectorXd& boundary_values,
                                     const Eigen::VectorXd& rhs) {
  if (op.is_spectral() || !op.geom->has_boundary)
    throw std::runtime_error("solve_dirichlet requires a boundary geometry");
  const Mesh& m = *op.geom->mesh;
  const auto& bverts = m.boundary_vertices;
  const int ni = static_cast<int>(op.interior.size());

  Eigen::VectorXd ub(bverts.size());
  for (size_t i = 0; i < bverts.size(); ++i) ub[i] = boundary_values[bverts[i]];
  Eigen::VectorXd b(ni);
  for (int i = 0; i < ni; ++i)
    b[i] = -op.lumped_mass[op.interior[i]] * rhs[op.interior[i]];
  b -= op.K_IB * ub;

  Eigen::VectorXd ui = op.factor->solve(b);
  double resid = (op.K_II * ui - b).norm();
  double scale = std::max(b.norm(), 1e-300);
  if (resid > 1e-10 * scale)
    throw std::runtime_error("Dirichlet solve residual " + std::to_string(resid / scale));

  Eigen::VectorXd u(m.num_vertices());
  for (size_t i = 0; i < bverts.size(); ++i) u[bverts[i]] = ub[i];
  for (int i = 0; i < ni; ++i) u[op.interior[i]] = ui[i];
  return u;
}

DiscreteFunction solve_dirichlet(const DiscreteOperator& op,
                                 const DiscreteFunction& boundary_data,
                                 const DiscreteFunction& rhs) {
  Eigen::VectorXd ur = solve_dirichlet_real(op, boundary_data.values.real(),
                                            rhs.values.real());
  DiscreteFunction out = DiscreteFunction::zeros(*op.geom);
  if (boundary_data.values.imag().isZero(0) && rhs.values.imag().isZero(0)) {
    out.values = ur.cast<std::complex<double>>();
  } else {
    Eigen::VectorXd ui = solve_dirichlet_real(op, boundary_data.values.imag(),
                                              rhs.values.imag());
    out.values = ur.cast<std::complex<double>>() +
                 std::complex<double>(0, 1) * ui.cast<std::complex<double>>();
  }
  out.check_finite();
  return out;
}

VectorField gradient(const DiscreteOperator& op, const DiscreteFunction& f) {
  VectorField out;
  out.geom = op.geom;
  if (op.is_spectral()) {
    const GridFFT& fft = *op.fft;
    const long n = fft.size();
    const int rank = static_cast<int>(fft.dims().size());
    out.cellwise = false;
    out.values.resize(n, rank);
    std::vector<std::complex<double>> hat(f.values.data(), f.values.data() + n);
    fft.forward(hat.data());
    std::vector<std::complex<double>> comp(n);
    for (int d = 0; d < rank; ++d) {
      for (long i = 0; i < n; ++i) {
        long m = i;
        for (int dd = 0; dd < d; ++dd) m /= fft.dims()[dd];
        m %= fft.dims()[d];
        comp[i] = hat[i] * std::complex<double>(0, fft.kappa(d, m));
      }
      fft.inverse(comp.data());
      for (long i = 0; i < n; ++i) out.values(i, d) = comp[i];
    }
    return out;
  }
  const Mesh& m = *op.geom->mesh;
  out.cellwise = true;
  out.values = Eigen::MatrixXcd::Zero(m.num_cells(), m.edim);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int i = 0; i <= m.dim; ++i)
      out.values.row(c) +=
          f.values[m.cells(c, i)] * op.grad_lambda[c].row(i).cast<std::complex<double>>();
  }
  return out;
}

DiscreteFunction laplacian(const DiscreteOperator& op, const DiscreteFunction& f) {
  DiscreteFunction out = DiscreteFunction::zeros(*op.geom);
  if (op.is_spectral()) {
    const GridFFT& fft = *op.fft;
    const long n = fft.size();
    std::vector<std::complex<double>> hat(f.values.data(), f.values.data() + n);
    fft.forward(hat.data());
    for (long i = 0; i < n; ++i) hat[i] *= -fft.kappa_sq(i);
    fft.inverse(hat.data());
    for (long i = 0; i < n; ++i) out.values[i] = hat[i];
    return out;
  }
  Eigen::VectorXcd kf = op.stiffness * f.values;
  for (long i = 0; i < out.values.size(); ++i)
    out.values[i] = -kf[i] / op.lumped_mass[i];
  return out;
}

namespace {

double weighted_lp(const Eigen::VectorXd& absvals, const Eigen::VectorXd& weights,
                   double p) {
  if (p < 1) throw std::runtime_error("lp_norm requires p >= 1");
  if (std::isinf(p)) return absvals.size() ? absvals.maxCoeff() : 0.0;
  double s = 0;
  for (long i = 0; i < absvals.size(); ++i) s += weights[i] * std::pow(absvals[i], p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const DiscreteFunction& f, double p, Region region) {
  const GeometryHandle& g = *f.geom;
  if (region == Region::boundary) {
    if (!g.has_boundary) throw std::runtime_error("no boundary");
    if (g.mesh) {
      const Mesh& m = *g.mesh;
      Eigen::VectorXd av(m.boundary_vertices.size()), w(m.boundary_vertices.size());
      for (size_t i = 0; i < m.boundary_vertices.size(); ++i) {
        av[i] = std::abs(f.values[m.boundary_vertices[i]]);
        w[i] = m.boundary_vertex_weights[m.boundary_vertices[i]];
      }
      return weighted_lp(av, w, p);
    }
    throw std::runtime_error("boundary norm needs a mesh");
  }
  Eigen::VectorXd av(g.num_nodes()), w(g.num_nodes());
  for (long i = 0; i < g.num_nodes(); ++i) {
    av[i] = std::abs(f.values[i]);
    w[i] = g.node_weight(i);
  }
  return weighted_lp(av, w, p);
}

double lp_norm(const VectorField& v, double p, Region region) {
  if (region != Region::interior) throw std::runtime_error("field norms are interior");
  const GeometryHandle& g = *v.geom;
  const long n = v.values.rows();
  Eigen::VectorXd av(n), w(n);
  for (long i = 0; i < n; ++i) {
    av[i] = v.values.row(i).norm();
    w[i] = v.cellwise ? g.mesh->cell_volumes[i] : g.node_weight(i);
  }
  return weighted_lp(av, w, p);
}

double first_nonzero_eigenvalue(const DiscreteOperator& op) {
  if (op.geom->has_boundary)
    throw std::runtime_error("first_nonzero_eigenvalue expects a closed geometry");
  if (op.is_spectral()) {
    const GridFFT& fft = *op.fft;
    double best = std::numeric_limits<double>::infinity();
    for (long i = 1; i < fft.size(); ++i) {
      double k2 = fft.kappa_sq(i);
      if (k2 > 0) best = std::min(best, k2);
    }
    return best;
  }
  // shift-inverted iteration with deflation of the constant mode
  const Eigen::SparseMatrix<double>& K = op.stiffness;
  const Eigen::VectorXd& M = op.lumped_mass;
  const long n = M.size();
  double sigma = 0.01 * K.diagonal().sum() / M.sum();
  Eigen::SparseMatrix<double> A = K;
  for (long i = 0; i < n; ++i) A.coeffRef(i, i) += sigma * M[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigen solver factorization failed");

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-1, 1);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = U(rng);
  double msum = M.sum();
  auto deflate = [&](Eigen::VectorXd& x) {
    double mean = M.dot(x) / msum;
    x.array() -= mean;
  };
  deflate(v);
  v /= std::sqrt(v.dot(M.asDiagonal() * v));

  double lambda = 0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = solver.solve(M.asDiagonal() * v);
    deflate(w);
    w /= std::sqrt(w.dot(M.asDiagonal() * w));
    v = w;
    lambda = v.dot(K * v) / v.dot(M.asDiagonal() * v);
    double resid = (K * v - lambda * (M.asDiagonal() * v)).norm() /
                   (lambda * (M.asDiagonal() * v)).norm();
    if (resid <= 1e-8) return lambda;
  }
  throw std::runtime_error("eigenvalue iteration did not converge");
}

double discrete_stokes_residual(const GeometryHandle& g, const DiscreteFunction& s1,
                                const VectorField& s2) {
  const Mesh& m = *g.mesh;
  if (s2.cellwise) throw std::runtime_error("s2 must be a nodal field");

  std::complex<double> t_grad = 0, t_div = 0, t_bdry = 0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const double vol = m.cell_volumes[c];
    Eigen::MatrixXd grads = barycentric_gradients(m, c);
    Eigen::RowVectorXcd grad_s1 = Eigen::RowVectorXcd::Zero(m.edim);
    Eigen::RowVectorXcd mean_s2 = Eigen::RowVectorXcd::Zero(m.edim);
    std::complex<double> mean_s1 = 0, div_s2 = 0;
    for (int i = 0; i <= m.dim; ++i) {
      int vtx = m.cells(c, i);
      grad_s1 += s1.values[vtx] * grads.row(i).cast<std::complex<double>>();
      mean_s2 += s2.values.row(vtx) / double(m.dim + 1);
      mean_s1 += s1.values[vtx] / double(m.dim + 1);
      for (int d = 0; d < m.edim; ++d) div_s2 += grads(i, d) * s2.values(vtx, d);
    }
    for (int d = 0; d < m.edim; ++d) t_grad += vol * grad_s1[d] * mean_s2[d];
    t_div += vol * mean_s1 * div_s2;
  }
  for (const auto& f : m.boundary_faces) {
    std::complex<double> mean_s1 = 0;
    Eigen::RowVectorXcd mean_s2 = Eigen::RowVectorXcd::Zero(m.edim);
    for (int i = 0; i < f.nverts; ++i) {
      mean_s1 += s1.values[f.verts[i]] / double(f.nverts);
      mean_s2 += s2.values.row(f.verts[i]) / double(f.nverts);
    }
    std::complex<double> s2n = 0;
    for (int d = 0; d < m.edim; ++d) s2n += mean_s2[d] * f.normal[d];
    t_bdry += f.area * mean_s1 * s2n;
  }
  return std::abs(t_grad + t_div - t_bdry);
}

}  // namespace greenlab
