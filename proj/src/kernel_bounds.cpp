#include "greenlab/kernel_bounds.hpp"

#include <cmath>
#include <map>

#include "greenlab/parallel.hpp"
#include "greenlab/quasirandom.hpp"

namespace greenlab {

namespace {

double log_model(double d) { return 1 + std::fabs(std::log(d)); }

struct PairSweep {
  const GreenTable& t;
  const GeometryHandle& g;
  double cutoff;

  template <class F>
  void run(F&& f) const {
    for (long s = 0; s < t.num_sources(); ++s) {
      Point x = t.sources.row(s).transpose();
      for (long i = 0; i < g.num_nodes(); ++i) {
        Point y = g.node(i);
        double d = g.distance(x, y);
        if (d < cutoff) continue;
        f(s, i, x, y, d);
      }
    }
  }
};

}  // namespace

std::vector<BoundReport> verify_uniform_bounds(const GreenTable& table) {
  const GeometryHandle& g = *table.geom;
  const int n = g.dim;
  const double h = g.resolution();
  PairSweep sweep{table, g, 5 * h};
  std::vector<BoundReport> out;

  if (g.has_boundary) {
    BoundReport rg{"G.decay"}, rd{"gradG.decay"};
    sweep.run([&](long s, long i, const Point&, const Point&, double d) {
      double model_g = n >= 3 ? std::pow(d, 2.0 - n) : log_model(d);
      double model_d = n >= 3 ? std::pow(d, 1.0 - n) : log_model(d) / d;
      rg.empirical_constant =
          std::max(rg.empirical_constant, std::fabs(table.values(s, i)) / model_g);
      rg.pair_count++;
      if (!table.gradients.empty()) {
        rd.empirical_constant = std::max(
            rd.empirical_constant, table.gradients[s].row(i).norm() / model_d);
        rd.pair_count++;
      }
    });
    out.push_back(rg);
    out.push_back(rd);
  } else {
    // closed manifold, one-sided forms: G <= C and -G <= C * model
    BoundReport up{"G.upper"}, low{"G.lower"}, rd{"gradG.decay"};
    sweep.run([&](long s, long i, const Point&, const Point&, double d) {
      double v = table.values(s, i);
      up.empirical_constant = std::max(up.empirical_constant, v);
      up.pair_count++;
      double model_g = n >= 3 ? std::pow(d, 2.0 - n) : log_model(d);
      low.empirical_constant = std::max(low.empirical_constant, -v / model_g);
      low.pair_count++;
      if (!table.gradients.empty()) {
        double model_d = n >= 3 ? std::pow(d, 1.0 - n) : 1.0 / d;
        rd.empirical_constant = std::max(
            rd.empirical_constant, table.gradients[s].row(i).norm() / model_d);
        rd.pair_count++;
      }
    });
    out.push_back(up);
    out.push_back(low);
    out.push_back(rd);
  }
  return out;
}

std::vector<BoundReport> verify_boundary_refined_bounds(const GreenTable& table) {
  const GeometryHandle& g = *table.geom;
  if (!g.has_boundary)
    throw std::runtime_error("boundary-refined bounds need a boundary geometry");
  const int n = g.dim;
  const double h = g.resolution();
  PairSweep sweep{table, g, 5 * h};

  BoundReport r4{"G.delta_weighted"}, r5{"gradG.min_form"};
  sweep.run([&](long s, long i, const Point& x, const Point&, double d) {
    double dx = g.boundary_distance(x);
    double model4 = n >= 3 ? std::pow(d, 1.0 - n) * dx : log_model(d) * dx / d;
    r4.empirical_constant =
        std::max(r4.empirical_constant, std::fabs(table.values(s, i)) / model4);
    r4.pair_count++;
    if (!table.gradients.empty()) {
      double base = n >= 3 ? std::pow(d, 1.0 - n) : log_model(d) / d;
      double model5 = base * std::min(1.0, dx / d);
      r5.empirical_constant =
          std::max(r5.empirical_constant, table.gradients[s].row(i).norm() / model5);
      r5.pair_count++;
    }
  });
  std::vector<BoundReport> out{r4, r5};

  auto oracle = make_green_oracle(g);
  if (oracle && table.provenance == Provenance::analytic) {
    // mixed second derivative via central differences of grad_y in x
    BoundReport r6{"gradXgradY.decay"};
    const long stride = std::max<long>(1, g.num_nodes() / 400);
    for (long s = 0; s < table.num_sources(); s += 3) {
      Point x = table.sources.row(s).transpose();
      for (long i = 0; i < g.num_nodes(); i += stride) {
        Point y = g.node(i);
        double d = g.distance(x, y);
        if (d < 5 * h) continue;
        double step = std::min(1e-5, 0.01 * std::min(d, g.boundary_distance(x) + 1e-9));
        if (step <= 0) continue;
        double frob = 0;
        for (int dd = 0; dd < g.edim; ++dd) {
          Point e = Point::Zero(g.edim);
          e[dd] = step;
          if (!g.contains(x + e) || !g.contains(x - e)) continue;
          Point diff = (oracle->grad_y(x + e, y) - oracle->grad_y(x - e, y)) / (2 * step);
          frob += diff.squaredNorm();
        }
        double model6 = n >= 3 ? std::pow(d, -double(n)) : log_model(d) / (d * d);
        r6.empirical_constant =
            std::max(r6.empirical_constant, std::sqrt(frob) / model6);
        r6.pair_count++;
      }
    }
    out.push_back(r6);
  }
  return out;
}

std::vector<BoundReport> bound_stability_study(
    const std::function<std::vector<BoundReport>(double)>& runner,
    const std::vector<double>& ladder) {
  std::vector<std::vector<BoundReport>> levels;
  for (double h : ladder) levels.push_back(runner(h));
  std::vector<BoundReport> out = levels.back();
  for (auto& rep : out) {
    rep.refinement_series.clear();
    for (auto& lvl : levels)
      for (auto& r : lvl)
        if (r.bound_id == rep.bound_id)
          rep.refinement_series.push_back(r.empirical_constant);
    const auto& s = rep.refinement_series;
    rep.stable = s.size() >= 2 &&
                 std::fabs(s[s.size() - 1] - s[s.size() - 2]) <
                     0.10 * std::max(std::fabs(s[s.size() - 2]), 1e-300);
    rep.monotone = true;
    for (size_t i = 1; i < s.size(); ++i)
      if (s[i] < s[i - 1] * 0.999) rep.monotone = false;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// integral of the oracle kernel^s over the clipped geodesic ball B(x, rad)
double near_field_oracle(const GeometryHandle& g, const GreenOracle& oracle,
                         const Point& x, double rad, double s, bool laplace) {
  const int n = g.dim;
  const int nr = 16, na = 24;
  const bool on_sphere = g.spec.kind == GeomKind::sphere2;
  double total = 0;
  static thread_local std::map<int, Eigen::MatrixXd> dirs_cache;
  auto it = dirs_cache.find(n);
  if (it == dirs_cache.end())
    it = dirs_cache.emplace(n, halton_sphere(na, n)).first;
  const Eigen::MatrixXd& dirs = it->second;

  Eigen::Vector3d e1, e2, xhat;
  double R = g.spec.params[0];
  if (on_sphere) {
    xhat = x.head(3) / R;
    e1 = xhat.unitOrthogonal();
    e2 = xhat.cross(e1);
  }
  for (int k = 0; k < nr; ++k) {
    double r = rad * (k + 0.5) / nr;
    double shell = on_sphere
                       ? 2 * M_PI * R * std::sin(r / R) * (rad / nr)
                       : unit_sphere_area(n) * std::pow(r, n - 1) * (rad / nr);
    double mean = 0;
    int inside = 0;
    for (int d = 0; d < na; ++d) {
      Point y;
      if (on_sphere) {
        double phi = 2 * M_PI * (d + 0.5) / na;
        Eigen::Vector3d t = std::cos(phi) * e1 + std::sin(phi) * e2;
        Eigen::Vector3d yv =
            R * (std::cos(r / R) * xhat + std::sin(r / R) * t);
        y = Point(3);
        y << yv[0], yv[1], yv[2];
      } else {
        y = x + r * Point(dirs.row(d % dirs.rows()).transpose());
        if (!g.contains(y, -1e-12)) continue;
      }
      ++inside;
      double k_val =
          laplace ? std::fabs(oracle.value(x, y)) : oracle.grad_y(x, y).norm();
      mean += std::pow(k_val, s);
    }
    if (inside) total += shell * (mean / na);
  }
  return total;
}

// same integral with the free-space model kernel (ball proxy, no clipping)
double near_field_model(int n, double rad, double s, bool laplace) {
  double om = unit_sphere_area(n);
  if (!laplace) {
    // |grad Phi| = r^{1-n}/om: integral = om^{1-s} rad^a / a with a=(1-n)s+n
    double a = (1 - n) * s + n;
    if (a <= 0) return 1e300;
    return std::pow(om, 1 - s) * std::pow(rad, a) / a;
  }
  if (n >= 3) {
    double c = 1.0 / ((n - 2) * om);
    double a = (2 - n) * s + n;
    if (a <= 0) return 1e300;
    return om * std::pow(c, s) * std::pow(rad, a) / a;
  }
  // n = 2: integral of (|ln r|/2pi)^s over the disk, radial quadrature
  double total = 0;
  const int nq = 400;
  for (int k = 0; k < nq; ++k) {
    double r = rad * (k + 0.5) / nq;
    total += 2 * M_PI * r * std::pow(std::fabs(std::log(r)) / (2 * M_PI), s) *
             (rad / nq);
  }
  return total;
}

double fit_envelope(const std::vector<double>& a, const std::vector<double>& N) {
  // smallest C with N(a) <= C/a on the whole grid
  double c = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::isfinite(N[i])) c = std::max(c, N[i] * a[i]);
  return c;
}

double geometric_mid(const std::vector<double>& v) {
  double lo = 1e300, hi = 0;
  for (double x : v)
    if (x > 0 && std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  return hi > 0 ? std::sqrt(lo * hi) : 0;
}

}  // namespace

double KernelProfile::interp(const std::vector<double>& N, double a,
                             bool* flagged) const {
  if (flagged) *flagged = true;
  if (a_grid.empty()) return 0;
  if (a <= a_grid.front()) return N.front();
  if (a >= a_grid.back()) return N.back();
  for (size_t i = 1; i < a_grid.size(); ++i)
    if (a <= a_grid[i]) {
      double t = (a - a_grid[i - 1]) / (a_grid[i] - a_grid[i - 1]);
      return (1 - t) * N[i - 1] + t * N[i];
    }
  return N.back();
}

KernelProfile kernel_lp_profile(const GreenTable& table,
                                const std::vector<double>& a_grid) {
  const GeometryHandle& g = *table.geom;
  KernelProfile prof;
  prof.n = g.dim;
  prof.table = &table;
  prof.a_grid = a_grid;
  for (double a : a_grid)
    if (a <= 0) throw std::runtime_error("a-grid entries must be positive");
  const int n = g.dim;
  const double h = g.resolution();
  const double cutoff = 5 * h;
  auto oracle = table.provenance == Provenance::analytic ? make_green_oracle(g)
                                                         : nullptr;

  const long S = table.num_sources();
  for (double a : a_grid) {
    double s_grad = (a - n) / (1.0 - n);
    double s_lap = n >= 3 ? (a - n) / (2.0 - n) : 0;
    double s_bdy = (a - n + 1) / (1.0 - n);
    double Ni = 0, Nl = 0, Nb = 0;
    for (long s = 0; s < S; ++s) {
      Point x = table.sources.row(s).transpose();
      double acc_i = 0, acc_l = 0;
      for (long i = 0; i < g.num_nodes(); ++i) {
        double d = g.distance(x, g.node(i));
        if (d < cutoff) continue;
        double w = g.node_weight(i);
        if (!table.gradients.empty())
          acc_i += w * std::pow(table.gradients[s].row(i).norm(), s_grad);
        if (n >= 3) acc_l += w * std::pow(std::fabs(table.values(s, i)), s_lap);
      }
      if (oracle) {
        acc_i += near_field_oracle(g, *oracle, x, cutoff, s_grad, false);
        if (n >= 3) acc_l += near_field_oracle(g, *oracle, x, cutoff, s_lap, true);
      } else {
        acc_i += near_field_model(n, cutoff, s_grad, false);
        if (n >= 3) acc_l += near_field_model(n, cutoff, s_lap, true);
      }
      Ni = std::max(Ni, acc_i);
      Nl = std::max(Nl, acc_l);
      if (g.has_boundary && table.poisson.size()) {
        double acc_b = 0;
        for (long f = 0; f < g.num_boundary_quad(); ++f)
          acc_b += g.boundary_quad_weight(f) *
                   std::pow(std::fabs(table.poisson(s, f)), s_bdy);
        Nb = std::max(Nb, acc_b);
      }
    }
    prof.N_interior.push_back(Ni);
    prof.N_laplace.push_back(Nl);
    prof.N_boundary.push_back(Nb);
  }
  prof.fitted_C_interior = fit_envelope(a_grid, prof.N_interior);
  prof.fitted_C_boundary = fit_envelope(a_grid, prof.N_boundary);
  prof.fitted_C_laplace = fit_envelope(a_grid, prof.N_laplace);

  // shape check: factor the measured uniform-bound constant out of each N
  {
    auto bounds = verify_uniform_bounds(table);
    for (const auto& b : bounds) {
      if (b.bound_id == "gradG.decay") prof.uniform_C_grad = b.empirical_constant;
      if (b.bound_id == "G.decay" || b.bound_id == "G.lower")
        prof.uniform_C_green = b.empirical_constant;
    }
    for (size_t i = 0; i < a_grid.size(); ++i) {
      double a = a_grid[i];
      double s_grad = (a - n) / (1.0 - n);
      double s_bdy = (a - n + 1) / (1.0 - n);
      prof.shape_interior.push_back(prof.N_interior[i] * a /
                                    std::pow(prof.uniform_C_grad, s_grad));
      if (prof.N_boundary[i] > 0)
        prof.shape_boundary.push_back(prof.N_boundary[i] * a /
                                      std::pow(prof.uniform_C_grad, s_bdy));
      if (n >= 3) {
        double s_lap = (a - n) / (2.0 - n);
        prof.shape_laplace.push_back(prof.N_laplace[i] * a /
                                     std::pow(prof.uniform_C_green, s_lap));
      }
    }
    prof.shape_C_interior = geometric_mid(prof.shape_interior);
    prof.shape_C_boundary = geometric_mid(prof.shape_boundary);
    prof.shape_C_laplace = geometric_mid(prof.shape_laplace);
  }

  if (n == 2) {
    prof.p_grid = {1, 2, 4, 8, 16};
    for (double p : prof.p_grid) {
      double sup = 0;
      for (long s = 0; s < S; ++s) {
        Point x = table.sources.row(s).transpose();
        double acc = 0;
        for (long i = 0; i < g.num_nodes(); ++i) {
          double d = g.distance(x, g.node(i));
          if (d < cutoff) continue;
          acc += g.node_weight(i) * std::pow(std::fabs(table.values(s, i)), p);
        }
        acc += near_field_model(2, cutoff, p, true);
        sup = std::max(sup, acc);
      }
      prof.lap_p_moments.push_back(sup);
    }
    // slope of log(moment^{1/p}) vs log p
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = static_cast<int>(prof.p_grid.size());
    for (int i = 0; i < m; ++i) {
      double lx = std::log(prof.p_grid[i]);
      double ly = std::log(prof.lap_p_moments[i]) / prof.p_grid[i];
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    prof.p_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// certificates

namespace {

// kernel magnitude row: |grad_y G(x_s, y_i)| or |G|, with the diagonal masked
double kernel_entry(const GreenTable& t, RecipeTarget target, long s, long i) {
  if (t.source_nodes[s] == i) return 0;
  if (target == RecipeTarget::laplace_interior) return std::fabs(t.values(s, i));
  return t.gradients[s].row(i).norm();
}

// the certificate sums integrate over the source variable, so the table
// must be square: sources are exactly the geometry nodes, in order
void require_square_table(const GreenTable& t) {
  if (t.num_sources() != t.geom->num_nodes())
    throw std::runtime_error("certificate sums need sources == all nodes");
  for (long s = 0; s < t.num_sources(); ++s)
    if (t.source_nodes[s] != s)
      throw std::runtime_error("certificate table sources out of order");
}

// sup over second argument of sum over first (transposed orientation)
double kernel_sum_transposed(const GreenTable& t, RecipeTarget target, double expo) {
  const GeometryHandle& g = *t.geom;
  require_square_table(t);
  double sup = 0;
  if (target == RecipeTarget::gradient_boundary) {
    for (long f = 0; f < g.num_boundary_quad(); ++f) {
      double acc = 0;
      for (long s = 0; s < t.num_sources(); ++s)
        acc += g.node_weight(s) * std::pow(std::fabs(t.poisson(s, f)), expo);
      sup = std::max(sup, acc);
    }
    return sup;
  }
  for (long i = 0; i < g.num_nodes(); ++i) {
    double acc = 0;
    for (long s = 0; s < t.num_sources(); ++s)
      acc += g.node_weight(s) * std::pow(kernel_entry(t, target, s, i), expo);
    sup = std::max(sup, acc);
  }
  return sup;
}

// sup over sources of sum over second argument (standard orientation)
double kernel_sum_standard(const GreenTable& t, RecipeTarget target, double expo) {
  const GeometryHandle& g = *t.geom;
  double sup = 0;
  for (long s = 0; s < t.num_sources(); ++s) {
    double acc = 0;
    if (target == RecipeTarget::gradient_boundary) {
      for (long f = 0; f < g.num_boundary_quad(); ++f)
        acc += g.boundary_quad_weight(f) * std::pow(std::fabs(t.poisson(s, f)), expo);
    } else {
      for (long i = 0; i < g.num_nodes(); ++i)
        acc += g.node_weight(i) * std::pow(kernel_entry(t, target, s, i), expo);
    }
    sup = std::max(sup, acc);
  }
  return sup;
}

}  // namespace

ConstantRecipe holder_constant_bound(int n, double p_in, double q, double r,
                                     const KernelProfile& profile,
                                     RecipeTarget target) {
  ConstantRecipe rec;
  rec.n = n;
  rec.p = p_in;
  rec.q = q;
  rec.r = r;
  rec.target = target;
  double p = p_in;
  if (p == 1.0) {
    p = 1.0 + 1e-6;  // the constant stays bounded as p -> 1+
    rec.p_was_limit = true;
  }
  rec.effective_q = q;

  if (target == RecipeTarget::gradient_boundary) {
    double rr = r == 1.0 ? 1.0 + 1e-6 : r;
    rec.effective_p = rec.effective_r = rr;
    rec.b = 0.5 * (std::min(n / (q * (n - 1.0)), 1.0) + 1.0 / rr);
    rec.exp1 = q * rec.b * (1 - n) + n;
    rec.exp2 = (rr * rec.b - 1) * (n - 1) / (rr - 1);
    rec.a_split = rr / q;
    rec.q0 = q == rr ? std::numeric_limits<double>::infinity()
                      : rr / (1 - rec.a_split);
    rec.r0 = rr / (rr - 1);
    if (!(rec.exp1 > 0 && rec.exp1 <= n && rec.exp2 > 0 && rec.exp2 <= n - 1))
      throw std::runtime_error("recipe exponents outside the lemma window");
    const GreenTable* t = profile.table;
    if (r == 1.0 && q == 1.0) {
      // direct Fubini certificate
      rec.effective_p = rec.effective_r = 1.0;
      rec.certified_bound = t ? kernel_sum_transposed(*t, target, 1.0)
                              : profile.interp(profile.N_interior, 1.0,
                                               &rec.interpolated);
      return rec;
    }
    double s1 = q * rec.b;                     // first-factor kernel exponent
    double s2 = rr * (1 - rec.b) / (rr - 1);   // third-factor kernel exponent
    if (t) {
      double Nm = kernel_sum_transposed(*t, target, s1);
      double Nb = kernel_sum_standard(*t, target, s2);
      rec.certified_bound =
          std::pow(Nm * std::pow(Nb, q * (rr - 1) / rr), 1.0 / q);
    } else {
      double Nm = profile.interp(profile.N_interior, rec.exp1, &rec.interpolated);
      double Nb = profile.interp(profile.N_boundary, rec.exp2, &rec.interpolated);
      rec.certified_bound =
          std::pow(Nm * std::pow(Nb, q * (rr - 1) / rr), 1.0 / q);
    }
    return rec;
  }

  const bool laplace = target == RecipeTarget::laplace_interior;
  const GreenTable* t = profile.table;
  rec.effective_p = p_in == 1.0 && q == 1.0 ? 1.0 : p;
  rec.effective_r = r;

  if (laplace && n == 2) {
    // the two n=2 branches of the |G|-kernel lemma
    if (q == 1.0) {
      rec.b = 0;
      rec.effective_p = 1.0;
      rec.certified_bound =
          t ? kernel_sum_transposed(*t, target, 1.0) : profile.lap_p_moments.front();
      return rec;
    }
    double s = p / (p - 1);
    rec.b = 0;
    rec.r0 = s;
    double vol = t ? t->geom->volume() : 1.0;
    double moment = t ? kernel_sum_standard(*t, target, s) : 0;
    double C2 = std::max(1.0, std::pow(moment / std::pow(s, s), 1.0 / (s + 1)));
    rec.certified_bound = std::pow(vol, 1.0 / q) * s * C2 * C2;
    return rec;
  }

  double denom = laplace ? (n - 2.0) : (n - 1.0);
  rec.b = laplace ? 0.5 * (std::max(0.0, (n - 2 * p) / (p * denom)) +
                           std::min(n / (q * denom), 1.0))
                  : 0.5 * (std::max(0.0, (n - p) / (p * denom)) +
                           std::min(n / (q * denom), 1.0));
  rec.exp1 = laplace ? q * rec.b * (2 - n) + n : q * rec.b * (1 - n) + n;
  rec.exp2 = laplace ? ((n - 2) * p * rec.b + 2 * p - n) / (p - 1)
                     : p * (1 - n) * (1 - rec.b) / (p - 1) + n;
  rec.a_split = p / q;
  rec.q0 = q == p ? std::numeric_limits<double>::infinity() : p / (1 - rec.a_split);
  rec.r0 = p / (p - 1);
  if (!(rec.exp1 > 0 && rec.exp1 <= n && rec.exp2 > 0 && rec.exp2 <= n))
    throw std::runtime_error("recipe exponents outside the lemma window");

  if (q == 1.0 && p_in == 1.0) {
    // p = q = 1: direct Fubini certificate (the recipe's p -> 1+ limit)
    rec.certified_bound = t ? kernel_sum_transposed(*t, target, 1.0)
                            : profile.interp(laplace ? profile.N_laplace
                                                     : profile.N_interior,
                                             1.0, &rec.interpolated);
    return rec;
  }

  double s1 = laplace ? q * rec.b : q * rec.b;   // kernel power, first factor
  double s2 = p * (1 - rec.b) / (p - 1);         // kernel power, third factor
  double vol_lift = 1.0;
  double qq = q;
  if (q < p) {  // lift the output norm: ||.||_q <= vol^{1/q-1/p} ||.||_p
    vol_lift = t ? std::pow(t->geom->volume(), 1.0 / q - 1.0 / p) : 1.0;
    qq = p;
  }
  if (t) {
    double N1 = kernel_sum_transposed(*t, target, s1);
    double N2 = kernel_sum_standard(*t, target, s2);
    rec.certified_bound =
        vol_lift * std::pow(N1 * std::pow(N2, qq * (p - 1) / p), 1.0 / qq);
  } else {
    const auto& Nvec = laplace ? profile.N_laplace : profile.N_interior;
    double N1 = profile.interp(Nvec, rec.exp1, &rec.interpolated);
    double N2 = profile.interp(Nvec, rec.exp2, &rec.interpolated);
    rec.certified_bound =
        vol_lift * std::pow(N1 * std::pow(N2, qq * (p - 1) / p), 1.0 / qq);
  }
  return rec;
}

OperatorRatio empirical_operator_ratio(const GreenTable& table, RecipeTarget target,
                                       double p, double q,
                                       const std::vector<Eigen::VectorXd>& family) {
  const GeometryHandle& g = *table.geom;
  require_square_table(table);
  OperatorRatio out;
  const long S = table.num_sources();
  for (size_t fi = 0; fi < family.size(); ++fi) {
    const Eigen::VectorXd& f = family[fi];
    double in_norm = 0, out_norm = 0;
    if (target == RecipeTarget::gradient_boundary) {
      for (long b = 0; b < g.num_boundary_quad(); ++b)
        in_norm += g.boundary_quad_weight(b) * std::pow(std::fabs(f[b]), p);
    } else {
      for (long i = 0; i < g.num_nodes(); ++i)
        in_norm += g.node_weight(i) * std::pow(std::fabs(f[i]), p);
    }
    in_norm = std::pow(in_norm, 1.0 / p);
    for (long s = 0; s < S; ++s) {
      double acc = 0;
      if (target == RecipeTarget::gradient_boundary) {
        for (long b = 0; b < g.num_boundary_quad(); ++b)
          acc += g.boundary_quad_weight(b) * std::fabs(table.poisson(s, b)) *
                 std::fabs(f[b]);
      } else {
        for (long i = 0; i < g.num_nodes(); ++i)
          acc += g.node_weight(i) * kernel_entry(table, target, s, i) *
                 std::fabs(f[i]);
      }
      out_norm += g.node_weight(s) * std::pow(acc, q);
    }
    out_norm = std::pow(out_norm, 1.0 / q);
    if (in_norm > 0 && out_norm / in_norm > out.max_ratio) {
      out.max_ratio = out_norm / in_norm;
      out.argmax = static_cast<int>(fi);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GradientScalingReport annulus_gradient_scaling(int n,
                                               const std::vector<double>& radii) {
  GradientScalingReport rep;
  rep.n = n;
  rep.radii = radii;
  rep.exact_value = n == 2 ? 1.0 / std::log(2.0) : 2.0;
  for (double r : radii) {
    // boundary-layer grading: first layer ~1.2% of r, ratio 1.4
    std::vector<double> breaks{r};
    double t = 0.012 * r;
    while (breaks.back() < 2 * r) {
      breaks.push_back(std::min(breaks.back() + t, 2 * r));
      t *= 1.4;
    }
    GeometryHandle g;
    if (n == 2) {
      GeometrySpec s;
      s.kind = GeomKind::annulus2d;
      s.params = {r, 2 * r};
      g = build_geometry(s);
      g.mesh = make_annulus_mesh_graded(breaks, 192);
    } else {
      GeometrySpec s;
      s.kind = GeomKind::annulus2d;  // placeholder spec; the mesh is the shell
      s.params = {r, 2 * r};
      g = build_geometry(s);
      g.mesh = make_shell3_mesh(breaks, 4);
      g.dim = g.edim = 3;
    }
    auto op = assemble(g);
    const Mesh& m = *g.mesh;
    Eigen::VectorXd bdata(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v)
      bdata[v] = m.vertex(v).norm() > 1.5 * r ? 1.0 : 0.0;
    Eigen::VectorXd u =
        solve_dirichlet_real(op, bdata, Eigen::VectorXd::Zero(m.num_vertices()));
    DiscreteFunction uf{&g, u.cast<std::complex<double>>()};
    VectorField grad = gradient(op, uf);
    double sup = 0;
    for (long c = 0; c < grad.values.rows(); ++c)
      sup = std::max(sup, grad.values.row(c).norm());
    rep.sup_grad_times_r.push_back(sup * r);
    rep.max_rel_err = std::max(
        rep.max_rel_err, std::fabs(sup * r - rep.exact_value) / rep.exact_value);
  }
  return rep;
}

}  // namespace greenlab
