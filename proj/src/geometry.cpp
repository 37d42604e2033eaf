#include "greenlab/geometry.hpp"

#include <cmath>
#include <sstream>

#include "greenlab/quasirandom.hpp"

namespace greenlab {

std::string kind_name(GeomKind k) {
  switch (k) {
    case GeomKind::disk: return "disk";
    case GeomKind::ellipse: return "ellipse";
    case GeomKind::annulus2d: return "annulus2d";
    case GeomKind::ball3: return "ball3";
    case GeomKind::ball4: return "ball4";
    case GeomKind::torus2: return "torus2";
    case GeomKind::torus3: return "torus3";
    case GeomKind::sphere2: return "sphere2";
  }
  return "?";
}

GeomKind kind_from_name(const std::string& name) {
  for (GeomKind k : {GeomKind::disk, GeomKind::ellipse, GeomKind::annulus2d,
                     GeomKind::ball3, GeomKind::ball4, GeomKind::torus2,
                     GeomKind::torus3, GeomKind::sphere2})
    if (kind_name(k) == name) return k;
  if (name == "square" || name == "cube" || name == "polygon")
    throw geometry_error("geometry '" + name +
                         "' has corners; the catalog only admits smooth boundaries");
  throw geometry_error("unknown geometry kind '" + name + "'");
}

std::string GeometrySpec::summary() const {
  std::ostringstream os;
  os << kind_name(kind) << "(";
  for (size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  os << ")";
  if (kind == GeomKind::torus2 || kind == GeomKind::torus3)
    os << " grid " << grid_n;
  else if (kind == GeomKind::ball4)
    os << " samples " << samples;
  else
    os << " h " << h;
  return os.str();
}

Point StructuredGrid::node(long i) const {
  Point p(rank());
  for (int d = 0; d < rank(); ++d) {
    p[d] = (i % dims[d]) * spacing[d];
    i /= dims[d];
  }
  return p;
}

long StructuredGrid::wrap_index(const std::vector<long>& multi) const {
  long idx = 0;
  for (int d = rank() - 1; d >= 0; --d) {
    long m = multi[d] % dims[d];
    if (m < 0) m += dims[d];
    idx = idx * dims[d] + m;
  }
  return idx;
}

namespace {

void check_params(const GeometrySpec& s, size_t n) {
  if (s.params.size() != n)
    throw geometry_error(kind_name(s.kind) + " expects " + std::to_string(n) +
                         " parameter(s)");
  for (double p : s.params)
    if (!(p > 0)) throw geometry_error("geometry parameters must be positive");
}

}  // namespace

GeometryHandle build_geometry(const GeometrySpec& spec) {
  GeometryHandle g;
  g.spec = spec;
  switch (spec.kind) {
    case GeomKind::disk: {
      check_params(spec, 1);
      g.dim = g.edim = 2;
      g.has_boundary = true;
      g.mesh = make_disk_mesh(spec.params[0], spec.h);
      break;
    }
    case GeomKind::ellipse: {
      check_params(spec, 2);
      g.dim = g.edim = 2;
      g.has_boundary = true;
      g.mesh = make_ellipse_mesh(spec.params[0], spec.params[1], spec.h);
      break;
    }
    case GeomKind::annulus2d: {
      check_params(spec, 2);
      if (!(spec.params[0] < spec.params[1]))
        throw geometry_error("annulus2d requires inner < outer");
      g.dim = g.edim = 2;
      g.has_boundary = true;
      g.mesh = make_annulus_mesh(spec.params[0], spec.params[1], spec.h);
      break;
    }
    case GeomKind::ball3: {
      check_params(spec, 1);
      g.dim = g.edim = 3;
      g.has_boundary = true;
      g.mesh = make_ball3_mesh(spec.params[0], spec.h);
      break;
    }
    case GeomKind::ball4: {
      check_params(spec, 1);
      g.dim = g.edim = 4;
      g.has_boundary = true;
      double R = spec.params[0];
      long n = spec.samples;
      g.sample_points = halton_ball(n, 4, R);
      double vol = M_PI * M_PI / 2.0 * std::pow(R, 4);
      g.sample_weights = Eigen::VectorXd::Constant(n, vol / n);
      long nb = std::max<long>(2000, n / 10);
      g.boundary_samples = halton_sphere(nb, 4) * R;
      double area = 2 * M_PI * M_PI * std::pow(R, 3);
      g.boundary_sample_weights = Eigen::VectorXd::Constant(nb, area / nb);
      g.boundary_sample_normals = g.boundary_samples / R;
      break;
    }
    case GeomKind::torus2:
    case GeomKind::torus3: {
      check_params(spec, 1);
      int n = spec.kind == GeomKind::torus2 ? 2 : 3;
      g.dim = g.edim = n;
      g.has_boundary = false;
      StructuredGrid grid;
      grid.dims.assign(n, spec.grid_n);
      grid.spacing.assign(n, spec.params[0] / spec.grid_n);
      grid.periodic.assign(n, true);
      g.grid = grid;
      break;
    }
    case GeomKind::sphere2: {
      check_params(spec, 1);
      g.dim = 2;
      g.edim = 3;
      g.has_boundary = false;
      g.mesh = make_sphere2_mesh(spec.params[0], spec.h);
      break;
    }
  }
  return g;
}

double GeometryHandle::volume() const {
  if (mesh) return mesh->volume();
  if (grid) return grid->num_nodes() * grid->node_volume();
  return sample_weights.sum();
}

double GeometryHandle::boundary_area() const {
  if (!has_boundary) return 0;
  if (mesh) return mesh->boundary_area();
  return boundary_sample_weights.sum();
}

double GeometryHandle::resolution() const {
  if (mesh) return mesh->h;
  if (grid) return *std::max_element(grid->spacing.begin(), grid->spacing.end());
  return spec.params[0] / std::pow(static_cast<double>(spec.samples), 0.25);
}

double GeometryHandle::distance(const Point& x, const Point& y) const {
  switch (spec.kind) {
    case GeomKind::torus2:
    case GeomKind::torus3: {
      double L = spec.params[0];
      double s = 0;
      for (int d = 0; d < dim; ++d) {
        double dd = std::fabs(x[d] - y[d]);
        dd = std::fmod(dd, L);
        dd = std::min(dd, L - dd);
        s += dd * dd;
      }
      return std::sqrt(s);
    }
    case GeomKind::sphere2: {
      double R = spec.params[0];
      double c = x.dot(y) / (R * R);
      return R * std::acos(std::clamp(c, -1.0, 1.0));
    }
    default:
      return (x - y).norm();
  }
}

namespace {

// Distance from an interior point to the ellipse x^2/a^2 + y^2/b^2 = 1.
// Root of f(t) = (a p/(t+a^2))^2 + (b q/(t+b^2))^2 - 1 on (-min(a,b)^2, inf);
// f is strictly decreasing there, so bisection is safe.
double ellipse_boundary_distance(double a, double b, double px, double py) {
  double p = std::fabs(px), q = std::fabs(py);
  if (p < 1e-300 && q < 1e-300) return std::min(a, b);
  auto f = [&](double t) {
    double u = a * p / (t + a * a), v = b * q / (t + b * b);
    return u * u + v * v - 1.0;
  };
  double lo = -std::min(a, b) * std::min(a, b) + 1e-300;
  double hi = std::max(a, b) * std::hypot(p, q);
  while (f(hi) > 0) hi = 2 * hi + 1;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
    if (hi - lo < 1e-15 * (1 + std::fabs(hi))) break;
  }
  double t = 0.5 * (lo + hi);
  double ex = a * a * p / (t + a * a), ey = b * b * q / (t + b * b);
  return std::hypot(p - ex, q - ey);
}

}  // namespace

double GeometryHandle::boundary_distance(const Point& x) const {
  if (!has_boundary) throw geometry_error("geometry has no boundary");
  switch (spec.kind) {
    case GeomKind::disk:
    case GeomKind::ball3:
    case GeomKind::ball4:
      return spec.params[0] - x.norm();
    case GeomKind::annulus2d:
      return std::min(x.norm() - spec.params[0], spec.params[1] - x.norm());
    case GeomKind::ellipse:
      return ellipse_boundary_distance(spec.params[0], spec.params[1], x[0], x[1]);
    default:
      throw geometry_error("no boundary");
  }
}

bool GeometryHandle::contains(const Point& x, double tol) const {
  switch (spec.kind) {
    case GeomKind::disk:
    case GeomKind::ball3:
    case GeomKind::ball4:
      return x.norm() <= spec.params[0] + tol;
    case GeomKind::ellipse: {
      double u = x[0] / spec.params[0], v = x[1] / spec.params[1];
      return u * u + v * v <= 1 + tol;
    }
    case GeomKind::annulus2d: {
      double r = x.norm();
      return r >= spec.params[0] - tol && r <= spec.params[1] + tol;
    }
    case GeomKind::torus2:
    case GeomKind::torus3:
      return true;
    case GeomKind::sphere2:
      return std::fabs(x.norm() - spec.params[0]) <= tol * spec.params[0] + tol;
  }
  return false;
}

long GeometryHandle::num_nodes() const {
  if (mesh) return mesh->num_vertices();
  if (grid) return grid->num_nodes();
  return sample_points.rows();
}

Point GeometryHandle::node(long i) const {
  if (mesh) return mesh->vertex(static_cast<int>(i));
  if (grid) return grid->node(i);
  return sample_points.row(i).transpose();
}

double GeometryHandle::node_weight(long i) const {
  if (mesh) return mesh->vertex_weights[i];
  if (grid) return grid->node_volume();
  return sample_weights[i];
}

bool GeometryHandle::node_on_boundary(long i) const {
  if (mesh && !mesh->is_boundary_vertex.empty())
    return mesh->is_boundary_vertex[i] != 0;
  return false;
}

long GeometryHandle::num_boundary_quad() const {
  if (!has_boundary) return 0;
  if (mesh) return static_cast<long>(mesh->boundary_faces.size());
  return boundary_samples.rows();
}

Point GeometryHandle::boundary_quad_point(long i) const {
  if (mesh) return mesh->boundary_faces[i].centroid;
  return boundary_samples.row(i).transpose();
}

double GeometryHandle::boundary_quad_weight(long i) const {
  if (mesh) return mesh->boundary_faces[i].area;
  return boundary_sample_weights[i];
}

Point GeometryHandle::boundary_quad_normal(long i) const {
  if (mesh) return mesh->boundary_faces[i].normal;
  return boundary_sample_normals.row(i).transpose();
}

double GeometryHandle::closed_form_volume() const {
  double R = spec.params[0];
  switch (spec.kind) {
    case GeomKind::disk: return M_PI * R * R;
    case GeomKind::ellipse: return M_PI * spec.params[0] * spec.params[1];
    case GeomKind::annulus2d:
      return M_PI * (spec.params[1] * spec.params[1] - spec.params[0] * spec.params[0]);
    case GeomKind::ball3: return 4.0 / 3.0 * M_PI * R * R * R;
    case GeomKind::ball4: return M_PI * M_PI / 2 * R * R * R * R;
    case GeomKind::torus2: return R * R;
    case GeomKind::torus3: return R * R * R;
    case GeomKind::sphere2: return 4 * M_PI * R * R;
  }
  return 0;
}

namespace {
double ellipse_perimeter(double a, double b) {
  // Gauss-Legendre on the quarter arc, 64 nodes (far below 1e-12 error).
  static const int N = 64;
  double sum = 0;
  for (int i = 0; i < N; ++i) {
    // Chebyshev-like midpoint rule on [0, pi/2] with many panels
    double t0 = M_PI / 2 * i / N, t1 = M_PI / 2 * (i + 1) / N;
    auto f = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    double m = 0.5 * (t0 + t1), hw = 0.5 * (t1 - t0);
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    for (int k = 0; k < 4; ++k) sum += hw * gw[k] * f(m + hw * gx[k]);
  }
  return 4 * sum;
}
}  // namespace

double GeometryHandle::closed_form_boundary_area() const {
  double R = spec.params[0];
  switch (spec.kind) {
    case GeomKind::disk: return 2 * M_PI * R;
    case GeomKind::ellipse: return ellipse_perimeter(spec.params[0], spec.params[1]);
    case GeomKind::annulus2d: return 2 * M_PI * (spec.params[0] + spec.params[1]);
    case GeomKind::ball3: return 4 * M_PI * R * R;
    case GeomKind::ball4: return 2 * M_PI * M_PI * R * R * R;
    default: return 0;
  }
}

}  // namespace greenlab
