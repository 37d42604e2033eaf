#include "greenlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace greenlab {

namespace {

double simplex_signed_volume(const Mesh& m, int c) {
  if (m.dim == 2 && m.edim == 2) {
    Eigen::Vector2d a = m.vertices.row(m.cells(c, 0)).head<2>();
    Eigen::Vector2d b = m.vertices.row(m.cells(c, 1)).head<2>();
    Eigen::Vector2d d = m.vertices.row(m.cells(c, 2)).head<2>();
    return 0.5 * ((b - a).x() * (d - a).y() - (b - a).y() * (d - a).x());
  }
  if (m.dim == 3) {
    Eigen::Vector3d a = m.vertices.row(m.cells(c, 0)).head<3>();
    Eigen::Matrix3d J;
    for (int k = 0; k < 3; ++k)
      J.col(k) = Eigen::Vector3d(m.vertices.row(m.cells(c, k + 1)).head<3>()) - a;
    return J.determinant() / 6.0;
  }
  // surface triangle in R^3: area, oriented outward from the origin
  Eigen::Vector3d a = m.vertices.row(m.cells(c, 0)).head<3>();
  Eigen::Vector3d b = m.vertices.row(m.cells(c, 1)).head<3>();
  Eigen::Vector3d d = m.vertices.row(m.cells(c, 2)).head<3>();
  Eigen::Vector3d n = (b - a).cross(d - a);
  double area = 0.5 * n.norm();
  Eigen::Vector3d ctr = (a + b + d) / 3.0;
  return n.dot(ctr) >= 0 ? area : -area;
}

}  // namespace

double Mesh::boundary_area() const {
  double s = 0;
  for (const auto& f : boundary_faces) s += f.area;
  return s;
}

void Mesh::finalize() {
  const int nv = num_vertices();
  const int nc = num_cells();
  cell_volumes.resize(nc);
  double scale = 0;
  for (int c = 0; c < nc; ++c) {
    double sv = simplex_signed_volume(*this, c);
    if (sv < 0) {  // make positively oriented
      std::swap(cells(c, 1), cells(c, 2));
      sv = -sv;
    }
    cell_volumes[c] = sv;
    scale = std::max(scale, sv);
  }
  for (int c = 0; c < nc; ++c)
    if (!(cell_volumes[c] > 1e-14 * scale))
      throw std::runtime_error("degenerate cell " + std::to_string(c));

  // h = max edge length, lumped vertex weights
  h = 0;
  vertex_weights = Eigen::VectorXd::Zero(nv);
  const int k = dim + 1;
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < k; ++i) {
      vertex_weights[cells(c, i)] += cell_volumes[c] / k;
      for (int j = i + 1; j < k; ++j) {
        double e = (vertices.row(cells(c, i)) - vertices.row(cells(c, j))).norm();
        h = std::max(h, e);
      }
    }
  }

  // boundary facets: those appearing in exactly one cell (volume meshes only)
  boundary_faces.clear();
  boundary_vertices.clear();
  is_boundary_vertex.assign(nv, 0);
  if (dim != edim) return;  // closed surface mesh

  std::map<std::vector<int>, std::pair<int, int>> facets;  // sorted verts -> (cell, opp)
  std::map<std::vector<int>, int> count;
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < k; ++i) {  // facet opposite local vertex i
      std::vector<int> f;
      for (int j = 0; j < k; ++j)
        if (j != i) f.push_back(cells(c, j));
      std::sort(f.begin(), f.end());
      count[f]++;
      facets[f] = {c, cells(c, i)};
    }
  }
  for (auto& [f, cnt] : count) {
    if (cnt == 1) {
      auto [c, opp] = facets[f];
      BoundaryFace bf;
      bf.nverts = dim;
      for (int i = 0; i < dim; ++i) bf.verts[i] = f[i];
      bf.cell = c;
      Point a = vertices.row(f[0]).transpose();
      if (dim == 2) {
        Point b = vertices.row(f[1]).transpose();
        Point t = b - a;
        bf.area = t.norm();
        bf.normal = make_point(t[1], -t[0]) / bf.area;
        bf.centroid = 0.5 * (a + b);
      } else {
        Eigen::Vector3d p0 = vertices.row(f[0]).head<3>();
        Eigen::Vector3d p1 = vertices.row(f[1]).head<3>();
        Eigen::Vector3d p2 = vertices.row(f[2]).head<3>();
        Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
        bf.area = 0.5 * n.norm();
        n.normalize();
        bf.normal.resize(3);
        bf.normal << n[0], n[1], n[2];
        bf.centroid = ((p0 + p1 + p2) / 3.0).eval();
      }
      Point opp_pt = vertices.row(opp).transpose();
      if (bf.normal.dot(bf.centroid - opp_pt) < 0) bf.normal = -bf.normal;
      boundary_faces.push_back(bf);
      for (int i = 0; i < dim; ++i) is_boundary_vertex[f[i]] = 1;
    } else if (cnt != 2) {
      throw std::runtime_error("non-manifold facet");
    }
  }
  boundary_vertex_weights = Eigen::VectorXd::Zero(nv);
  for (const auto& bf : boundary_faces)
    for (int i = 0; i < bf.nverts; ++i)
      boundary_vertex_weights[bf.verts[i]] += bf.area / bf.nverts;
  for (int v = 0; v < nv; ++v)
    if (is_boundary_vertex[v]) boundary_vertices.push_back(v);

  // closed-surface check: every boundary sub-facet must occur exactly twice
  std::map<std::vector<int>, int> sub;
  for (const auto& bf : boundary_faces) {
    for (int i = 0; i < bf.nverts; ++i) {
      std::vector<int> e;
      for (int j = 0; j < bf.nverts; ++j)
        if (j != i) e.push_back(bf.verts[j]);
      if (e.empty()) e.push_back(bf.verts[0]);  // 2D: endpoints
      std::sort(e.begin(), e.end());
      sub[e]++;
    }
  }
  for (auto& [e, cnt] : sub)
    if (cnt != 2) throw std::runtime_error("boundary surface not closed");
}

// ---------------------------------------------------------------------------
// disk / ellipse (hexagonal ring triangulation)

namespace {

int ring_start(int i) { return 1 + 3 * i * (i - 1); }

Mesh hex_disk_topology(int m) {
  Mesh mesh;
  mesh.dim = mesh.edim = 2;
  int nv = 1 + 3 * m * (m + 1);
  mesh.vertices.resize(nv, 2);
  mesh.vertices.row(0) << 0, 0;
  for (int i = 1; i <= m; ++i) {
    for (int j = 0; j < 6 * i; ++j) {
      double th = 2 * M_PI * j / (6.0 * i);
      double r = double(i) / m;
      mesh.vertices.row(ring_start(i) + j) << r * std::cos(th), r * std::sin(th);
    }
  }
  std::vector<std::array<int, 3>> tri;
  for (int s = 0; s < 6; ++s) {
    // innermost band
    tri.push_back({ring_start(1) + s, ring_start(1) + (s + 1) % 6, 0});
  }
  for (int i = 2; i <= m; ++i) {
    auto out = [&](int s, int t) { return ring_start(i) + (s * i + t) % (6 * i); };
    auto in = [&](int s, int t) {
      return ring_start(i - 1) + (s * (i - 1) + t) % (6 * (i - 1));
    };
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t < i; ++t) tri.push_back({out(s, t), out(s, t + 1), in(s, t)});
      for (int t = 0; t < i - 1; ++t)
        tri.push_back({out(s, t + 1), in(s, t + 1), in(s, t)});
    }
  }
  mesh.cells.resize(static_cast<int>(tri.size()), 3);
  for (size_t c = 0; c < tri.size(); ++c)
    mesh.cells.row(static_cast<int>(c)) << tri[c][0], tri[c][1], tri[c][2];
  return mesh;
}

}  // namespace

Mesh make_disk_mesh(double radius, double h) {
  int m = std::max(2, static_cast<int>(std::lround(radius / h)));
  Mesh mesh = hex_disk_topology(m);
  mesh.vertices *= radius;
  mesh.finalize();
  return mesh;
}

namespace {

// Ellipse boundary arclength s(phi) = \int_0^phi |E'(t)| dt, by Simpson panels.
double ellipse_arc(double a, double b, double phi) {
  int n = 512;
  double sum = 0, dt = phi / n;
  auto f = [&](double t) {
    double dx = -a * std::sin(t), dy = b * std::cos(t);
    return std::hypot(dx, dy);
  };
  for (int i = 0; i < n; ++i) {
    double t0 = i * dt;
    sum += dt / 6 * (f(t0) + 4 * f(t0 + dt / 2) + f(t0 + dt));
  }
  return sum;
}

double ellipse_phi_of_arc(double a, double b, double s, double total) {
  double lo = 0, hi = 2 * M_PI;
  s = std::clamp(s, 0.0, total);
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (ellipse_arc(a, b, mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Mesh make_ellipse_mesh(double a, double b, double h) {
  int m = std::max(2, static_cast<int>(std::lround(std::max(a, b) / h)));
  Mesh mesh = hex_disk_topology(m);
  double total = ellipse_arc(a, b, 2 * M_PI);
  // angle parameter -> arclength-uniform boundary point, cached per vertex angle
  for (int v = 1; v < mesh.num_vertices(); ++v) {
    double x = mesh.vertices(v, 0), y = mesh.vertices(v, 1);
    double rho = std::hypot(x, y);
    double th = std::atan2(y, x);
    if (th < 0) th += 2 * M_PI;
    double phi = ellipse_phi_of_arc(a, b, th / (2 * M_PI) * total, total);
    mesh.vertices.row(v) << rho * a * std::cos(phi), rho * b * std::sin(phi);
  }
  mesh.finalize();
  return mesh;
}

Mesh make_annulus_mesh(double inner, double outer, double h) {
  int nr = std::max(2, static_cast<int>(std::lround((outer - inner) / h)));
  std::vector<double> radii(nr + 1);
  for (int kq = 0; kq <= nr; ++kq) radii[kq] = inner + (outer - inner) * kq / nr;
  int na = std::max(8, static_cast<int>(std::lround(M_PI * (inner + outer) / h)));
  return make_annulus_mesh_graded(radii, na);
}

Mesh make_annulus_mesh_graded(const std::vector<double>& radii, int angular) {
  const int nr = static_cast<int>(radii.size()) - 1;
  const int na = angular;
  Mesh mesh;
  mesh.dim = mesh.edim = 2;
  mesh.vertices.resize((nr + 1) * na, 2);
  for (int kr = 0; kr <= nr; ++kr)
    for (int j = 0; j < na; ++j) {
      double th = 2 * M_PI * j / na;
      mesh.vertices.row(kr * na + j) << radii[kr] * std::cos(th),
          radii[kr] * std::sin(th);
    }
  mesh.cells.resize(2 * nr * na, 3);
  int c = 0;
  for (int kr = 0; kr < nr; ++kr)
    for (int j = 0; j < na; ++j) {
      int j1 = (j + 1) % na;
      int v00 = kr * na + j, v01 = kr * na + j1;
      int v10 = (kr + 1) * na + j, v11 = (kr + 1) * na + j1;
      mesh.cells.row(c++) << v00, v01, v10;
      mesh.cells.row(c++) << v01, v11, v10;
    }
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// ball in R^3: Kuhn-subdivided cube mapped radially onto the ball

Mesh make_ball3_mesh(double radius, double h) {
  int n = std::max(2, static_cast<int>(std::lround(2 * radius / h)));
  if (n % 2) ++n;  // keep the center on a vertex
  Mesh mesh;
  mesh.dim = mesh.edim = 3;
  int nv1 = n + 1;
  mesh.vertices.resize(nv1 * nv1 * nv1, 3);
  auto vid = [&](int i, int j, int k) { return (k * nv1 + j) * nv1 + i; };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Eigen::Vector3d c(2.0 * i / n - 1, 2.0 * j / n - 1, 2.0 * k / n - 1);
        double linf = c.lpNorm<Eigen::Infinity>();
        double l2 = c.norm();
        Eigen::Vector3d p =
            (l2 > 0) ? Eigen::Vector3d(c * (linf / l2) * radius) : Eigen::Vector3d::Zero();
        mesh.vertices.row(vid(i, j, k)) = p;
      }
  // Kuhn split of each cube cell along the (+,+,+) diagonal
  static const int kuhn[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                                 {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};
  mesh.cells.resize(6 * n * n * n, 4);
  int c = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int corner[8];
        for (int b = 0; b < 8; ++b)
          corner[b] = vid(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
        for (int t = 0; t < 6; ++t) {
          mesh.cells.row(c++) << corner[kuhn[t][0]], corner[kuhn[t][1]],
              corner[kuhn[t][2]], corner[kuhn[t][3]];
        }
      }
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// icosphere and radial-shell meshes

namespace {

void icosphere(int subdiv, Eigen::MatrixXd& verts, Eigen::MatrixXi& tris) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdiv; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      Eigen::Vector3d p = (v[a] + v[b]).normalized();
      v.push_back(p);
      int id = static_cast<int>(v.size()) - 1;
      mid[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> nf;
    for (auto& tr : f) {
      int ab = midpoint(tr[0], tr[1]);
      int bc = midpoint(tr[1], tr[2]);
      int ca = midpoint(tr[2], tr[0]);
      nf.push_back({tr[0], ab, ca});
      nf.push_back({tr[1], bc, ab});
      nf.push_back({tr[2], ca, bc});
      nf.push_back({ab, bc, ca});
    }
    f = std::move(nf);
  }
  verts.resize(static_cast<int>(v.size()), 3);
  for (size_t i = 0; i < v.size(); ++i) verts.row(static_cast<int>(i)) = v[i];
  tris.resize(static_cast<int>(f.size()), 3);
  for (size_t i = 0; i < f.size(); ++i)
    tris.row(static_cast<int>(i)) << f[i][0], f[i][1], f[i][2];
}

}  // namespace

Mesh make_shell3_mesh(const std::vector<double>& radii, int subdiv) {
  Eigen::MatrixXd sv;
  Eigen::MatrixXi st;
  icosphere(subdiv, sv, st);
  const int ns = static_cast<int>(sv.rows());
  const int nl = static_cast<int>(radii.size());
  Mesh mesh;
  mesh.dim = mesh.edim = 3;
  mesh.vertices.resize(ns * nl, 3);
  for (int l = 0; l < nl; ++l)
    for (int i = 0; i < ns; ++i) mesh.vertices.row(l * ns + i) = sv.row(i) * radii[l];
  std::vector<std::array<int, 4>> tets;
  for (int l = 0; l + 1 < nl; ++l) {
    for (int tr = 0; tr < st.rows(); ++tr) {
      // order columns so the prism split picks conforming quad diagonals
      int col[3] = {st(tr, 0), st(tr, 1), st(tr, 2)};
      std::sort(col, col + 3);
      int a0 = l * ns + col[0], b0 = l * ns + col[1], c0 = l * ns + col[2];
      int a1 = a0 + ns, b1 = b0 + ns, c1 = c0 + ns;
      tets.push_back({a0, b0, c0, c1});
      tets.push_back({a0, b0, c1, b1});
      tets.push_back({a0, b1, c1, a1});
    }
  }
  mesh.cells.resize(static_cast<int>(tets.size()), 4);
  for (size_t c = 0; c < tets.size(); ++c)
    mesh.cells.row(static_cast<int>(c)) << tets[c][0], tets[c][1], tets[c][2],
        tets[c][3];
  mesh.finalize();
  return mesh;
}

Mesh make_sphere2_mesh(double radius, double h) {
  int subdiv = std::max(1, static_cast<int>(std::ceil(std::log2(1.0515 * radius / h))));
  Eigen::MatrixXd sv;
  Eigen::MatrixXi st;
  icosphere(subdiv, sv, st);
  Mesh mesh;
  mesh.dim = 2;
  mesh.edim = 3;
  mesh.vertices = sv * radius;
  mesh.cells = st;
  mesh.finalize();
  return mesh;
}

}  // namespace greenlab
