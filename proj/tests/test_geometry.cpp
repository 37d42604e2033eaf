#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "greenlab/geometry.hpp"

using namespace greenlab;

namespace {

GeometryHandle quick(GeomKind k, std::vector<double> params, double h = 0.1,
                     int grid_n = 32) {
  GeometrySpec s;
  s.kind = k;
  s.params = std::move(params);
  s.h = h;
  s.grid_n = grid_n;
  s.samples = 20000;
  return build_geometry(s);
}

}  // namespace

TEST_CASE("catalog volumes match closed forms") {
  auto disk = quick(GeomKind::disk, {1.0}, 0.05);
  CHECK(std::fabs(disk.volume() - M_PI) / M_PI < 0.005);

  auto ball = quick(GeomKind::ball3, {1.0}, 0.1);
  CHECK(std::fabs(ball.boundary_area() - 4 * M_PI) / (4 * M_PI) < 0.02);

  auto torus = quick(GeomKind::torus2, {1.0}, 0.1, 256);
  CHECK(!torus.has_boundary);
  CHECK(torus.volume() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("volume and boundary area converge under refinement") {
  for (GeomKind k : {GeomKind::disk, GeomKind::ellipse, GeomKind::annulus2d,
                     GeomKind::ball3, GeomKind::sphere2}) {
    std::vector<double> params = {1.0};
    if (k == GeomKind::ellipse) params = {1.3, 0.8};
    if (k == GeomKind::annulus2d) params = {1.0, 2.0};
    double prev_v = 0, prev_b = 0;
    int level = 0;
    for (double h : {0.4, 0.2, 0.1}) {
      auto g = quick(k, params, h);
      double ev = std::fabs(g.volume() - g.closed_form_volume());
      double eb = g.has_boundary
                      ? std::fabs(g.boundary_area() - g.closed_form_boundary_area())
                      : 0.0;
      if (level > 0) {
        CHECK(ev <= 0.55 * prev_v + 1e-12);  // at least linear decay
        if (g.has_boundary) CHECK(eb <= 0.55 * prev_b + 1e-12);
      }
      prev_v = ev;
      prev_b = eb;
      ++level;
    }
  }
}

TEST_CASE("mesh structural invariants") {
  for (GeomKind k : {GeomKind::disk, GeomKind::ellipse, GeomKind::annulus2d,
                     GeomKind::ball3}) {
    std::vector<double> params = {1.0};
    if (k == GeomKind::ellipse) params = {1.3, 0.8};
    if (k == GeomKind::annulus2d) params = {1.0, 2.0};
    auto g = quick(k, params, 0.2);
    const Mesh& m = *g.mesh;
    CHECK(!m.boundary_faces.empty());
    double tally = 0;
    for (int c = 0; c < m.num_cells(); ++c) {
      CHECK(m.cell_volumes[c] > 0);
      tally += m.cell_volumes[c];
    }
    CHECK(std::fabs(tally - m.volume()) <= 1e-12 * tally);
    for (const auto& f : m.boundary_faces)
      CHECK(std::fabs(f.normal.norm() - 1.0) < 1e-12);
    // outward: normal aligns with the exact outward direction of the surface
    for (const auto& f : m.boundary_faces) {
      Point out = f.centroid;
      if (k == GeomKind::ellipse) {
        out = make_point(f.centroid[0] / (1.3 * 1.3), f.centroid[1] / (0.8 * 0.8));
      } else if (k == GeomKind::annulus2d && f.centroid.norm() < 1.5) {
        out = -f.centroid;  // inner rim
      }
      out /= out.norm();
      CHECK(f.normal.dot(out) > 0.9);
    }
  }
  auto sph = quick(GeomKind::sphere2, {1.0}, 0.2);
  CHECK(sph.mesh->boundary_faces.empty());
  CHECK(!sph.has_boundary);
}

TEST_CASE("distance closed forms") {
  auto disk = quick(GeomKind::disk, {1.0}, 0.2);
  CHECK(disk.distance(make_point(0, 0), make_point(0.5, 0)) ==
        doctest::Approx(0.5).epsilon(1e-14));

  auto torus = quick(GeomKind::torus2, {1.0}, 0.1, 16);
  CHECK(torus.distance(make_point(0.1, 0), make_point(0.9, 0)) ==
        doctest::Approx(0.2).epsilon(1e-12));

  auto sph = quick(GeomKind::sphere2, {1.0}, 0.3);
  CHECK(sph.distance(make_point(0, 0, 1), make_point(0, 0, -1)) ==
        doctest::Approx(M_PI).epsilon(1e-14));
}

TEST_CASE("boundary distance closed forms") {
  auto disk = quick(GeomKind::disk, {1.0}, 0.2);
  CHECK(disk.boundary_distance(make_point(0.3, 0)) == doctest::Approx(0.7).epsilon(1e-13));

  auto ann = quick(GeomKind::annulus2d, {1.0, 2.0}, 0.2);
  CHECK(ann.boundary_distance(make_point(1.25, 0)) == doctest::Approx(0.25).epsilon(1e-13));

  auto ball = quick(GeomKind::ball3, {1.0}, 0.3);
  CHECK(ball.boundary_distance(make_point(0, 0, 0)) == doctest::Approx(1.0).epsilon(1e-13));

  auto torus = quick(GeomKind::torus2, {1.0});
  CHECK_THROWS_AS(torus.boundary_distance(make_point(0.5, 0.5)), geometry_error);

  // ellipse: against brute-force boundary sampling
  auto ell = quick(GeomKind::ellipse, {1.3, 0.8}, 0.2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int trial = 0; trial < 50; ++trial) {
    Point x = make_point(U(rng), U(rng) * 0.6);
    if (!ell.contains(x)) continue;
    double d = ell.boundary_distance(x);
    double brute = 1e300;
    for (int i = 0; i < 20000; ++i) {
      double t = 2 * M_PI * i / 20000.0;
      brute = std::min(brute,
                       std::hypot(x[0] - 1.3 * std::cos(t), x[1] - 0.8 * std::sin(t)));
    }
    CHECK(d == doctest::Approx(brute).epsilon(1e-6));
  }
}

TEST_CASE("distance is a metric on random samples") {
  for (GeomKind k : {GeomKind::disk, GeomKind::torus2, GeomKind::sphere2}) {
    auto g = quick(k, {1.0}, 0.3, 8);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0, 1);
    for (int t = 0; t < 200; ++t) {
      long i = static_cast<long>(U(rng) * g.num_nodes());
      long j = static_cast<long>(U(rng) * g.num_nodes());
      Point x = g.node(i), y = g.node(j);
      double dxy = g.distance(x, y), dyx = g.distance(y, x);
      CHECK(std::fabs(dxy - dyx) <= 1e-12);
      CHECK(dxy >= 0);
      if (i == j) CHECK(dxy == 0);
      if (dxy == 0) CHECK((x - y).norm() < 1e-12);
    }
  }
}

TEST_CASE("boundary distance is dominated by vertex distances") {
  for (GeomKind k : {GeomKind::disk, GeomKind::ellipse, GeomKind::annulus2d}) {
    std::vector<double> params = {1.0};
    if (k == GeomKind::ellipse) params = {1.3, 0.8};
    if (k == GeomKind::annulus2d) params = {1.0, 2.0};
    auto g = quick(k, params, 0.1);
    const Mesh& m = *g.mesh;
    double mesh_tol = 1e-12 + 0.5 * m.h * m.h;  // boundary chord sagitta
    for (long i = 0; i < g.num_nodes(); i += 17) {
      if (g.node_on_boundary(i)) continue;
      Point x = g.node(i);
      double bd = g.boundary_distance(x);
      for (int v : m.boundary_vertices)
        CHECK(bd <= g.distance(x, m.vertex(v)) + mesh_tol);
    }
  }
}

TEST_CASE("torus distance is translation invariant") {
  auto g = quick(GeomKind::torus2, {1.0}, 0.1, 16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 100; ++t) {
    Point x = make_point(U(rng), U(rng)), y = make_point(U(rng), U(rng));
    Point sh = make_point(U(rng), U(rng));
    Point xs = x + sh, ys = y + sh;
    for (int d = 0; d < 2; ++d) {
      xs[d] = std::fmod(xs[d], 1.0);
      ys[d] = std::fmod(ys[d], 1.0);
    }
    CHECK(g.distance(x, y) == doctest::Approx(g.distance(xs, ys)).epsilon(1e-12));
  }
}

TEST_CASE("bad geometry requests are rejected") {
  CHECK_THROWS_AS(kind_from_name("square"), geometry_error);
  CHECK_THROWS_AS(kind_from_name("dodecahedron"), geometry_error);
  GeometrySpec s;
  s.kind = GeomKind::annulus2d;
  s.params = {2.0, 1.0};
  CHECK_THROWS_AS(build_geometry(s), geometry_error);
  s.kind = GeomKind::disk;
  s.params = {-1.0};
  CHECK_THROWS_AS(build_geometry(s), geometry_error);
}
