#include <filesystem>
#include <sstream>

#include "greenlab/green.hpp"
#include "greenlab/parallel.hpp"
#include "greenlab/report_io.hpp"

namespace greenlab {

Eigen::VectorXd green_numeric(const DiscreteOperator& op, const Point& x) {
  const GeometryHandle& g = *op.geom;
  if (!g.has_boundary || !g.mesh)
    throw std::runtime_error("corrector split needs a meshed boundary geometry");
  if (!g.contains(x) || g.boundary_distance(x) <= 0)
    throw std::runtime_error("source outside the interior");
  const Mesh& m = *g.mesh;
  FundamentalSolution fs = fundamental_solution(g.dim);

  Eigen::VectorXd gamma(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    double r = (m.vertex(v) - x).norm();
    gamma[v] = r > 0 ? fs.phi(r) : 0;  // source-vertex slot is masked anyway
  }
  Eigen::VectorXd corrector =
      solve_dirichlet_real(op, gamma, Eigen::VectorXd::Zero(m.num_vertices()));
  return gamma - corrector;
}

Eigen::VectorXd poisson_from_column(const DiscreteOperator& op,
                                    const Eigen::VectorXd& column) {
  // Variational flux: for a column harmonic in the interior, the boundary
  // rows of the stiffness matrix carry the weak normal derivative
  // (K u)_v = bdry int (du/dnu) phi_v, so P at v is that flux divided by the
  // lumped boundary weight. Face values average the two (three) vertices.
  const Mesh& m = *op.geom->mesh;
  Eigen::VectorXd flux = op.stiffness * column;
  Eigen::VectorXd p(m.boundary_faces.size());
  for (size_t f = 0; f < m.boundary_faces.size(); ++f) {
    const BoundaryFace& bf = m.boundary_faces[f];
    double v = 0;
    for (int i = 0; i < bf.nverts; ++i)
      v += flux[bf.verts[i]] / m.boundary_vertex_weights[bf.verts[i]];
    p[f] = v / bf.nverts;
  }
  return p;
}

Eigen::MatrixXd default_sources(const GeometryHandle& g, int count, unsigned seed,
                                std::vector<long>* node_ids) {
  const long n = g.num_nodes();
  const double h = g.resolution();
  std::vector<long> candidates;
  std::vector<long> near_candidates;
  for (long i = 0; i < n; ++i) {
    if (g.node_on_boundary(i)) continue;
    if (!g.has_boundary) {
      candidates.push_back(i);
      continue;
    }
    double bd = g.boundary_distance(g.node(i));
    if (bd < 5 * h) continue;
    (bd >= 0.15 * g.spec.params[0] ? candidates : near_candidates).push_back(i);
  }
  if (candidates.empty()) candidates = near_candidates;
  if (candidates.empty()) {
    // coarse mesh: 5h exceeds the inradius, fall back to the deepest nodes
    std::vector<std::pair<double, long>> by_depth;
    for (long i = 0; i < n; ++i)
      if (!g.node_on_boundary(i))
        by_depth.emplace_back(g.boundary_distance(g.node(i)), i);
    std::sort(by_depth.rbegin(), by_depth.rend());
    for (size_t i = 0; i < by_depth.size() && i < static_cast<size_t>(count); ++i)
      candidates.push_back(by_depth[i].second);
  }
  if (candidates.empty()) throw std::runtime_error("no interior nodes for sources");

  // greedy farthest-point over the interior candidates, then a graded
  // near-boundary tail (the worst cases of the estimates live there)
  int n_near = g.has_boundary ? count / 3 : 0;
  int n_main = count - std::min<int>(n_near, near_candidates.size());
  std::vector<long> chosen;
  long start = candidates[seed % candidates.size()];
  chosen.push_back(start);
  std::vector<double> dist(candidates.size(), 1e300);
  while (static_cast<int>(chosen.size()) < n_main &&
         chosen.size() < candidates.size()) {
    long best = -1;
    double bestd = -1;
    for (size_t idx = 0; idx < candidates.size(); ++idx) {
      dist[idx] = std::min(dist[idx], g.distance(g.node(candidates[idx]),
                                                 g.node(chosen.back())));
      if (dist[idx] > bestd) {
        bestd = dist[idx];
        best = candidates[idx];
      }
    }
    if (best < 0 || bestd <= 0) break;
    chosen.push_back(best);
  }
  if (!near_candidates.empty()) {
    // graded by boundary distance: pick evenly across the sorted list
    std::sort(near_candidates.begin(), near_candidates.end(), [&](long a, long b) {
      return g.boundary_distance(g.node(a)) < g.boundary_distance(g.node(b));
    });
    for (int k = 0; k < n_near; ++k) {
      size_t pos = near_candidates.size() * k / std::max(1, n_near);
      chosen.push_back(near_candidates[std::min(pos, near_candidates.size() - 1)]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

  Eigen::MatrixXd out(chosen.size(), g.edim);
  for (size_t i = 0; i < chosen.size(); ++i)
    out.row(i) = g.node(chosen[i]).transpose();
  if (node_ids) *node_ids = chosen;
  return out;
}

namespace {

// measured harmonic-extension error: the corrector solve of a known harmonic
// polynomial at this resolution
double measure_corrector_error(const DiscreteOperator& op) {
  const GeometryHandle& g = *op.geom;
  const Mesh& m = *g.mesh;
  Eigen::VectorXd exact(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    Point p = m.vertex(v);
    exact[v] = g.dim == 2 ? p[0] * p[0] - p[1] * p[1] : p[0] * p[1];
  }
  Eigen::VectorXd u =
      solve_dirichlet_real(op, exact, Eigen::VectorXd::Zero(m.num_vertices()));
  return (u - exact).cwiseAbs().maxCoeff();
}

void spectral_torus_columns(const GeometryHandle& g, const DiscreteOperator& op,
                            const Eigen::MatrixXd& sources, GreenTable& table,
                            bool want_gradients) {
  const GridFFT& fft = *op.fft;
  const long n = fft.size();
  const int rank = g.dim;
  const double V = g.volume();
  for (long s = 0; s < sources.rows(); ++s) {
    Point x = sources.row(s).transpose();
    std::vector<std::complex<double>> hat(n);
    std::vector<std::vector<std::complex<double>>> ghat(
        want_gradients ? rank : 0, std::vector<std::complex<double>>(n));
    for (long i = 0; i < n; ++i) {
      double k2 = fft.kappa_sq(i);
      if (k2 == 0) {
        hat[i] = 0;
        continue;
      }
      double ph = 0;
      long rem = i;
      Point kap(rank);
      for (int d = 0; d < rank; ++d) {
        long md = rem % fft.dims()[d];
        rem /= fft.dims()[d];
        kap[d] = fft.kappa(d, md);
        ph += kap[d] * x[d];
      }
      std::complex<double> coef =
          -double(n) / (V * k2) * std::exp(std::complex<double>(0, -ph));
      hat[i] = coef;
      if (want_gradients)
        for (int d = 0; d < rank; ++d)
          ghat[d][i] = coef * std::complex<double>(0, kap[d]);
    }
    fft.inverse(hat.data());
    for (long i = 0; i < n; ++i) table.values(s, i) = hat[i].real();
    if (want_gradients) {
      table.gradients[s].resize(n, rank);
      for (int d = 0; d < rank; ++d) {
        fft.inverse(ghat[d].data());
        for (long i = 0; i < n; ++i) table.gradients[s](i, d) = ghat[d][i].real();
      }
    }
  }
}

}  // namespace

GreenTable build_green_table(const GeometryHandle& g, const DiscreteOperator* op,
                             const Eigen::MatrixXd& sources, bool want_gradients,
                             TorusTableMode torus_mode) {
  GreenTable table;
  table.geom = &g;
  table.sources = sources;
  const long S = sources.rows();
  const long N = g.num_nodes();
  table.values.resize(S, N);
  table.gradients.assign(want_gradients ? S : 0, Eigen::MatrixXd());
  table.source_nodes.assign(S, -1);
  for (long s = 0; s < S; ++s) {
    Point x = sources.row(s).transpose();
    for (long i = 0; i < N; ++i)
      if ((g.node(i) - x).norm() < 1e-12) {
        table.source_nodes[s] = i;
        break;
      }
  }

  auto oracle = make_green_oracle(g);
  // Spectral columns have exact zero mean (the discrete identities need
  // that); the Ewald oracle gives pointwise-true values for bound sweeps.
  if (g.grid && torus_mode == TorusTableMode::spectral) {
    if (!op) throw std::runtime_error("grid tables need the assembled operator");
    table.provenance = Provenance::analytic;
    table.tol = 1e-9;
    spectral_torus_columns(g, *op, sources, table, want_gradients);
    return table;
  } else if (oracle) {
    table.provenance = Provenance::analytic;
    table.tol = 1e-9;
    parallel_for(S, [&](long s) {
      Point x = sources.row(s).transpose();
      if (want_gradients) table.gradients[s].resize(N, g.edim);
      for (long i = 0; i < N; ++i) {
        if (table.source_nodes[s] == i) {
          table.values(s, i) = 0;  // masked diagonal
          if (want_gradients) table.gradients[s].row(i).setZero();
          continue;
        }
        Point y = g.node(i);
        table.values(s, i) = oracle->value(x, y);
        if (want_gradients)
          table.gradients[s].row(i) = oracle->grad_y(x, y).transpose();
      }
    });
    if (g.has_boundary) {
      long B = g.num_boundary_quad();
      table.poisson.resize(S, B);
      parallel_for(S, [&](long s) {
        Point x = sources.row(s).transpose();
        for (long f = 0; f < B; ++f)
          table.poisson(s, f) = oracle->poisson(x, g.boundary_quad_point(f));
      });
    }
    return table;
  } else {
    if (!op) throw std::runtime_error("corrector split needs the assembled operator");
    table.provenance = Provenance::corrector_split;
    table.err_harm = measure_corrector_error(*op);
    double bd_min = 1e300;
    for (long s = 0; s < S; ++s)
      bd_min = std::min(bd_min, g.boundary_distance(sources.row(s).transpose()));
    double diam = 2 * g.spec.params[0];
    table.tol =
        25 * table.err_harm * std::pow(diam / bd_min, g.dim - 1) + 1e-12;
    long B = g.num_boundary_quad();
    table.poisson.resize(S, B);
    std::vector<Eigen::VectorXd> cols(S);
    parallel_for(S, [&](long s) {
      Point x = sources.row(s).transpose();
      cols[s] = green_numeric(*op, x);
      table.poisson.row(s) = poisson_from_column(*op, cols[s]).transpose();
    });
    for (long s = 0; s < S; ++s) {
      table.values.row(s) = cols[s].transpose();
      if (table.source_nodes[s] >= 0) table.values(s, table.source_nodes[s]) = 0;
      if (want_gradients) {
        DiscreteFunction f{&g, cols[s].cast<std::complex<double>>()};
        VectorField vf = gradient(*op, f);
        // cellwise gradients, averaged to nodes for the table
        Eigen::MatrixXd nodal = Eigen::MatrixXd::Zero(N, g.edim);
        Eigen::VectorXd wsum = Eigen::VectorXd::Zero(N);
        const Mesh& m = *g.mesh;
        for (int c = 0; c < m.num_cells(); ++c)
          for (int i = 0; i <= m.dim; ++i) {
            nodal.row(m.cells(c, i)) +=
                m.cell_volumes[c] * vf.values.row(c).real();
            wsum[m.cells(c, i)] += m.cell_volumes[c];
          }
        for (long i = 0; i < N; ++i) nodal.row(i) /= wsum[i];
        table.gradients[s] = nodal;
      }
    }
    return table;
  }

  return table;
}

bool GreenInvariantReport::pass() const {
  return max_positive <= sign_tol && max_boundary <= table_tol + 1e-12 &&
         max_asymmetry <= table_tol + 1e-12 && max_mean <= mean_tol + 1e-12;
}

std::string GreenInvariantReport::describe() const {
  std::ostringstream os;
  os << "sign " << max_positive << " (tol " << sign_tol << "), boundary "
     << max_boundary << ", symmetry " << max_asymmetry << " (tol " << table_tol
     << "), mean " << max_mean << " (tol " << mean_tol << ")";
  return os.str();
}

GreenInvariantReport check_green_invariants(const GreenTable& table) {
  const GeometryHandle& g = *table.geom;
  GreenInvariantReport rep;
  rep.table_tol = table.tol;
  const long S = table.num_sources();
  const long N = g.num_nodes();
  const double h = g.resolution();

  if (g.has_boundary) {
    for (long s = 0; s < S; ++s)
      for (long i = 0; i < N; ++i)
        rep.max_positive = std::max(rep.max_positive, table.values(s, i));
    for (long s = 0; s < S; ++s)
      for (long i = 0; i < N; ++i)
        if (g.node_on_boundary(i))
          rep.max_boundary = std::max(rep.max_boundary, std::fabs(table.values(s, i)));
    rep.mean_tol = 1e300;  // not applicable
  } else {
    // closed manifold: mean zero (masked diagonal entries contribute 0; the
    // missing singular mass is covered by the mesh-level tolerance)
    rep.sign_tol = 1e300;
    rep.mean_tol = g.grid ? 1e-9 : h * h * (1 + std::fabs(std::log(h)));
    for (long s = 0; s < S; ++s) {
      double mean = 0;
      for (long i = 0; i < N; ++i) mean += g.node_weight(i) * table.values(s, i);
      rep.max_mean = std::max(rep.max_mean, std::fabs(mean));
    }
  }

  for (long s1 = 0; s1 < S; ++s1)
    for (long s2 = s1 + 1; s2 < S; ++s2) {
      long n1 = table.source_nodes[s1], n2 = table.source_nodes[s2];
      if (n1 < 0 || n2 < 0) continue;
      rep.max_asymmetry = std::max(
          rep.max_asymmetry, std::fabs(table.values(s1, n2) - table.values(s2, n1)));
    }
  return rep;
}

void save_green_table(const GreenTable& table, const std::string& dir) {
  ensure_dir(dir);
  write_csv(dir + "/values.csv", table.values);
  write_csv(dir + "/sources.csv", table.sources);
  if (!table.gradients.empty()) {
    Eigen::MatrixXd flat(table.num_sources() * table.gradients[0].rows(),
                         table.gradients[0].cols());
    for (long s = 0; s < table.num_sources(); ++s)
      flat.middleRows(s * table.gradients[0].rows(), table.gradients[0].rows()) =
          table.gradients[s];
    write_csv(dir + "/gradients.csv", flat);
  }
  if (table.poisson.size()) write_csv(dir + "/poisson.csv", table.poisson);
  Eigen::MatrixXd targets(table.geom->num_nodes(), table.geom->edim);
  for (long i = 0; i < table.geom->num_nodes(); ++i)
    targets.row(i) = table.geom->node(i).transpose();
  write_csv(dir + "/targets.csv", targets);

  ojson manifest;
  manifest["geometry"] = table.geom->spec.summary();
  manifest["provenance"] =
      table.provenance == Provenance::analytic ? "analytic" : "corrector_split";
  manifest["h"] = table.geom->resolution();
  manifest["tol"] = table.tol;
  manifest["err_harm"] = table.err_harm;
  manifest["sources"] = table.num_sources();
  manifest["targets"] = table.geom->num_nodes();
  manifest["source_nodes"] = table.source_nodes;
  manifest["geometry_hash"] = hash_matrix(targets);
  write_json(dir + "/table.json", manifest);
}

GreenTable load_green_table(const GeometryHandle& g, const std::string& dir) {
  GreenTable table;
  table.geom = &g;
  table.values = read_csv(dir + "/values.csv");
  table.sources = read_csv(dir + "/sources.csv");
  ojson manifest = read_json(dir + "/table.json");
  table.provenance = manifest["provenance"] == "analytic"
                         ? Provenance::analytic
                         : Provenance::corrector_split;
  table.tol = manifest["tol"];
  table.err_harm = manifest["err_harm"];
  table.source_nodes = manifest["source_nodes"].get<std::vector<long>>();
  if (std::filesystem::exists(dir + "/gradients.csv")) {
    Eigen::MatrixXd flat = read_csv(dir + "/gradients.csv");
    long per = flat.rows() / table.sources.rows();
    for (long s = 0; s < table.sources.rows(); ++s)
      table.gradients.push_back(flat.middleRows(s * per, per));
  }
  if (std::filesystem::exists(dir + "/poisson.csv"))
    table.poisson = read_csv(dir + "/poisson.csv");
  return table;
}

}  // namespace greenlab
