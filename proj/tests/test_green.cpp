#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "greenlab/green.hpp"

using namespace greenlab;

namespace {

GeometryHandle quick(GeomKind k, std::vector<double> params, double h = 0.1,
                     int grid_n = 64) {
  GeometrySpec s;
  s.kind = k;
  s.params = std::move(params);
  s.h = h;
  s.grid_n = grid_n;
  s.samples = 20000;
  return build_geometry(s);
}

}  // namespace

TEST_CASE("fundamental solution normalization") {
  auto f3 = fundamental_solution(3);
  CHECK(f3.phi(0.5) == doctest::Approx(-1 / (2 * M_PI)).epsilon(1e-14));
  auto f2 = fundamental_solution(2);
  CHECK(f2.phi(1.0) == 0.0);
  for (int n : {2, 3, 4, 5})
    for (double r : {0.1, 1.0}) {
      CHECK(std::fabs(fundamental_solution(n).flux(r) - 1.0) < 1e-12);
    }
  CHECK_THROWS(fundamental_solution(1));
}

TEST_CASE("ball and disk image-method values") {
  auto disk = quick(GeomKind::disk, {1.0}, 0.2);
  auto og = make_green_oracle(disk);
  CHECK(og->value(make_point(0, 0), make_point(0.5, 0)) ==
        doctest::Approx(std::log(0.5) / (2 * M_PI)).epsilon(1e-13));
  // boundary vanishing off the vertex set too
  for (double th : {0.0, 0.3, 2.0})
    CHECK(std::fabs(og->value(make_point(0.3, 0.2),
                              make_point(std::cos(th), std::sin(th)))) < 1e-12);

  auto ball = quick(GeomKind::ball3, {1.0}, 0.4);
  auto ob = make_green_oracle(ball);
  CHECK(ob->value(make_point(0, 0, 0), make_point(0.5, 0, 0)) ==
        doctest::Approx(-(1 / (4 * M_PI)) * (1 / 0.5 - 1)).epsilon(1e-13));

  // gradient against central differences
  Point x = make_point(0.3, -0.1, 0.2), y = make_point(-0.2, 0.4, 0.1);
  Point grad = ob->grad_y(x, y);
  for (int d = 0; d < 3; ++d) {
    Point e = Point::Zero(3);
    e[d] = 1e-6;
    double fd = (ob->value(x, y + e) - ob->value(x, y - e)) / 2e-6;
    CHECK(grad[d] == doctest::Approx(fd).epsilon(1e-6));
  }

  // Poisson kernel equals the normal derivative of G at the boundary
  Point yb = make_point(0, 0.6, 0.8);
  double p = ob->poisson(x, yb);
  double fd = (0 - ob->value(x, 0.999999 * yb)) / (1e-6 * yb.norm());
  CHECK(p == doctest::Approx(fd).epsilon(1e-4));
  CHECK(ob->poisson(make_point(0, 0, 0), yb) ==
        doctest::Approx(1 / (4 * M_PI)).epsilon(1e-13));
}

TEST_CASE("annulus separation-of-variables oracle") {
  auto ann = quick(GeomKind::annulus2d, {1.0, 2.0}, 0.1);
  auto oa = make_green_oracle(ann);
  Point x = make_point(1.31, 0.42);

  SUBCASE("boundary vanishing and sign") {
    for (double th : {0.1, 1.7, 4.0}) {
      CHECK(std::fabs(oa->value(x, make_point(std::cos(th), std::sin(th)))) < 1e-13);
      CHECK(std::fabs(oa->value(x, make_point(2 * std::cos(th), 2 * std::sin(th)))) <
            1e-13);
    }
    for (double r : {1.05, 1.4, 1.9})
      for (double th : {0.0, 0.9, 3.0})
        CHECK(oa->value(x, make_point(r * std::cos(th), r * std::sin(th))) <= 1e-13);
  }

  SUBCASE("symmetry") {
    Point y = make_point(-0.3, 1.62);
    CHECK(oa->value(x, y) == doctest::Approx(oa->value(y, x)).epsilon(1e-12));
  }

  SUBCASE("distributional laplacian: flux through a small circle is 1") {
    // integrate dG/dn over a circle of radius eps around x
    double eps = 0.03;
    int nq = 2000;
    double flux = 0;
    for (int i = 0; i < nq; ++i) {
      double th = 2 * M_PI * i / nq;
      Point nrm = make_point(std::cos(th), std::sin(th));
      Point y = x + eps * nrm;
      flux += oa->grad_y(x, y).dot(nrm) * (2 * M_PI * eps / nq);
    }
    CHECK(flux == doctest::Approx(1.0).epsilon(1e-4));
  }

  SUBCASE("gradient against central differences") {
    Point y = make_point(0.2, -1.5);
    Point grad = oa->grad_y(x, y);
    for (int d = 0; d < 2; ++d) {
      Point e = Point::Zero(2);
      e[d] = 1e-6;
      double fd = (oa->value(x, y + e) - oa->value(x, y - e)) / 2e-6;
      CHECK(grad[d] == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  SUBCASE("harmonic in y away from x (FD laplacian is the zero of machine scale)") {
    Point y = make_point(0.1, 1.4);
    double e = 1e-4, lap = -4 * oa->value(x, y);
    lap += oa->value(x, y + make_point(e, 0)) + oa->value(x, y - make_point(e, 0));
    lap += oa->value(x, y + make_point(0, e)) + oa->value(x, y - make_point(0, e));
    CHECK(std::fabs(lap / (e * e)) < 1e-4);
  }
}

TEST_CASE("torus Ewald oracle") {
  auto t2 = quick(GeomKind::torus2, {1.0}, 0, 64);
  auto ot = make_green_oracle(t2);
  Point x = make_point(0.31, 0.47);

  SUBCASE("laplacian equals -1/V away from the source") {
    Point y = make_point(0.81, 0.12);
    double e = 1e-4, lap = -4 * ot->value(x, y);
    lap += ot->value(x, y + make_point(e, 0)) + ot->value(x, y - make_point(e, 0));
    lap += ot->value(x, y + make_point(0, e)) + ot->value(x, y - make_point(0, e));
    CHECK(lap / (e * e) == doctest::Approx(-1.0).epsilon(1e-4));
  }

  SUBCASE("translation invariance and symmetry") {
    Point y = make_point(0.9, 0.33), t = make_point(0.213, 0.717);
    CHECK(ot->value(x, y) == doctest::Approx(ot->value(x + t, y + t)).epsilon(1e-12));
    CHECK(ot->value(x, y) == doctest::Approx(ot->value(y, x)).epsilon(1e-12));
  }

  SUBCASE("log singularity with the free-space normalization") {
    auto fs = fundamental_solution(2);
    double c1 = ot->value(x, x + make_point(1e-4, 0)) - fs.phi(1e-4);
    double c2 = ot->value(x, x + make_point(0, 1e-6)) - fs.phi(1e-6);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-6));  // smooth remainder
  }

  SUBCASE("matches the spectral column as the grid refines") {
    double prev = 1e300;
    for (int n : {32, 64, 128}) {
      auto g = quick(GeomKind::torus2, {1.0}, 0, n);
      auto op = assemble(g);
      std::vector<long> ids;
      Eigen::MatrixXd src = default_sources(g, 3, 1, &ids);
      auto table = build_green_table(g, &op, src, false);
      double err = 0;
      for (long s = 0; s < table.num_sources(); ++s)
        for (long i = 0; i < g.num_nodes(); ++i) {
          Point y = g.node(i);
          Point xs = table.sources.row(s).transpose();
          if (g.distance(xs, y) < 0.2) continue;  // band-limit ringing region
          err = std::max(err,
                         std::fabs(table.values(s, i) - ot->value(xs, y)));
        }
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 2e-4);
  }

  SUBCASE("3d torus laplacian check") {
    auto t3 = quick(GeomKind::torus3, {1.0}, 0, 16);
    auto o3 = make_green_oracle(t3);
    Point x3 = make_point(0.2, 0.6, 0.4), y3 = make_point(0.7, 0.1, 0.9);
    double e = 1e-3, lap = -6 * o3->value(x3, y3);
    for (int d = 0; d < 3; ++d) {
      Point dd = Point::Zero(3);
      dd[d] = e;
      lap += o3->value(x3, y3 + dd) + o3->value(x3, y3 - dd);
    }
    CHECK(lap / (e * e) == doctest::Approx(-1.0).epsilon(1e-3));
  }
}

TEST_CASE("sphere Green function") {
  auto sph = quick(GeomKind::sphere2, {1.0}, 0.1);
  auto os = make_green_oracle(sph);

  SUBCASE("legendre series converges to the closed form") {
    for (double th : {M_PI / 3, M_PI / 2, 2 * M_PI / 3}) {
      double c = std::cos(th);
      // sum_{l>=1} (2l+1)/(-l(l+1)) P_l(c) / (4 pi)
      double pm1 = 1, p0 = c, sum = 0;
      for (int l = 1; l <= 20000; ++l) {
        sum += (2 * l + 1) / (-double(l) * (l + 1)) * p0 / (4 * M_PI);
        double p1 = ((2 * l + 1) * c * p0 - l * pm1) / (l + 1);
        pm1 = p0;
        p0 = p1;
      }
      Point x = make_point(0, 0, 1);
      Point y = make_point(std::sin(th), 0, std::cos(th));
      CHECK(os->value(x, y) == doctest::Approx(sum).epsilon(1e-4));
    }
  }

  SUBCASE("mean zero by quadrature") {
    double mean = 0;
    int nq = 20000;
    Point x = make_point(0, 0, 1);
    for (int i = 0; i < nq; ++i) {
      double c = -1 + 2 * (i + 0.5) / nq;  // uniform in cos(theta)
      double th = std::acos(c);
      Point y = make_point(std::sin(th), 0, c);
      mean += os->value(x, y) * (4 * M_PI / nq);
    }
    CHECK(std::fabs(mean) < 1e-4);
  }

  SUBCASE("gradient magnitude cot(theta/2)/4pi") {
    Point x = make_point(0, 0, 1);
    double th = 0.7;
    Point y = make_point(std::sin(th), 0, std::cos(th));
    CHECK(os->grad_y(x, y).norm() ==
          doctest::Approx(std::tan(M_PI_2 - th / 2) / (4 * M_PI)).epsilon(1e-12));
  }
}

TEST_CASE("corrector split against the disk oracle") {
  auto disk = quick(GeomKind::disk, {1.0}, 0.05);
  auto op = assemble(disk);
  auto og = make_green_oracle(disk);
  Point x = make_point(0, 0);
  Eigen::VectorXd col = green_numeric(op, x);
  double err = 0;
  for (long i = 0; i < disk.num_nodes(); ++i) {
    Point y = disk.node(i);
    if ((y - x).norm() < 5 * disk.mesh->h) continue;
    err = std::max(err, std::fabs(col[i] - og->value(x, y)));
  }
  CHECK(err < 2e-3);

  // Poisson kernel at the center: constant 1/2pi, unit mass
  Eigen::VectorXd p = poisson_from_column(op, col);
  double mass = 0;
  for (size_t f = 0; f < disk.mesh->boundary_faces.size(); ++f) {
    CHECK(p[f] == doctest::Approx(1 / (2 * M_PI)).epsilon(0.05));
    mass += p[f] * disk.mesh->boundary_faces[f].area;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("table invariants across the catalog") {
  SUBCASE("disk analytic table") {
    auto g = quick(GeomKind::disk, {1.0}, 0.08);
    auto op = assemble(g);
    std::vector<long> ids;
    Eigen::MatrixXd src = default_sources(g, 20, 1, &ids);
    CHECK(src.rows() >= 15);
    auto table = build_green_table(g, &op, src);
    auto rep = check_green_invariants(table);
    INFO(rep.describe());
    CHECK(rep.pass());
  }
  SUBCASE("ellipse corrector table") {
    auto g = quick(GeomKind::ellipse, {1.3, 0.8}, 0.08);
    auto op = assemble(g);
    Eigen::MatrixXd src = default_sources(g, 12, 1);
    auto table = build_green_table(g, &op, src);
    CHECK(table.provenance == Provenance::corrector_split);
    auto rep = check_green_invariants(table);
    INFO(rep.describe());
    CHECK(rep.pass());
  }
  SUBCASE("torus spectral table has exact zero mean") {
    auto g = quick(GeomKind::torus2, {1.0}, 0, 64);
    auto op = assemble(g);
    Eigen::MatrixXd src = default_sources(g, 10, 1);
    auto table = build_green_table(g, &op, src);
    auto rep = check_green_invariants(table);
    INFO(rep.describe());
    CHECK(rep.max_mean <= 1e-9);
    CHECK(rep.pass());
  }
  SUBCASE("sphere mesh table") {
    auto g = quick(GeomKind::sphere2, {1.0}, 0.07);
    auto op = assemble(g);
    Eigen::MatrixXd src = default_sources(g, 10, 1);
    auto table = build_green_table(g, &op, src);
    auto rep = check_green_invariants(table);
    INFO(rep.describe());
    CHECK(rep.pass());
  }
  SUBCASE("ball4 sample table is analytic-only") {
    auto g = quick(GeomKind::ball4, {1.0});
    auto table = build_green_table(g, nullptr, default_sources(g, 8, 1));
    CHECK(table.provenance == Provenance::analytic);
    auto rep = check_green_invariants(table);
    INFO(rep.describe());
    CHECK(rep.pass());
  }
}

TEST_CASE("table serialization round trip") {
  auto g = quick(GeomKind::disk, {1.0}, 0.2);
  auto op = assemble(g);
  auto table = build_green_table(g, &op, default_sources(g, 5, 1));
  std::string dir = "/tmp/greenlab_table_test";
  std::filesystem::remove_all(dir);
  save_green_table(table, dir);
  auto loaded = load_green_table(g, dir);
  CHECK((loaded.values - table.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.source_nodes == table.source_nodes);
  CHECK(loaded.provenance == table.provenance);
  CHECK((loaded.poisson - table.poisson).cwiseAbs().maxCoeff() == 0.0);
}
