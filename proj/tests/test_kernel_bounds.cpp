#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "greenlab/kernel_bounds.hpp"

using namespace greenlab;

namespace {

GeometryHandle quick(GeomKind k, std::vector<double> params, double h = 0.1,
                     int grid_n = 32) {
  GeometrySpec s;
  s.kind = k;
  s.params = std::move(params);
  s.h = h;
  s.grid_n = grid_n;
  return build_geometry(s);
}

GreenTable square_table(const GeometryHandle& g) {
  Eigen::MatrixXd src(g.num_nodes(), g.edim);
  for (long i = 0; i < g.num_nodes(); ++i) src.row(i) = g.node(i).transpose();
  return build_green_table(g, nullptr, src);
}

std::vector<Eigen::VectorXd> volume_family(const GeometryHandle& g, unsigned seed) {
  std::vector<Eigen::VectorXd> fam;
  long n = g.num_nodes();
  fam.push_back(Eigen::VectorXd::Ones(n));
  Eigen::VectorXd bump(n), poly(n), nearb(n);
  for (long i = 0; i < n; ++i) {
    Point p = g.node(i);
    bump[i] = std::exp(-8 * p.squaredNorm());
    poly[i] = std::fabs(p[0] + 0.3 * p[1]);
    nearb[i] = g.has_boundary
                   ? std::exp(-g.boundary_distance(p) / (3 * g.resolution()))
                   : std::cos(2 * M_PI * p[0]);
  }
  fam.push_back(bump);
  fam.push_back(poly);
  fam.push_back(nearb);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  Eigen::VectorXd rnd(n);
  for (long i = 0; i < n; ++i) rnd[i] = U(rng);
  fam.push_back(rnd);
  return fam;
}

std::vector<Eigen::VectorXd> boundary_family(const GeometryHandle& g, unsigned seed) {
  std::vector<Eigen::VectorXd> fam;
  long b = g.num_boundary_quad();
  fam.push_back(Eigen::VectorXd::Ones(b));
  Eigen::VectorXd osc(b);
  for (long f = 0; f < b; ++f) {
    Point p = g.boundary_quad_point(f);
    osc[f] = 1.2 + std::cos(3 * std::atan2(p[1], p[0]));
  }
  fam.push_back(osc);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  Eigen::VectorXd rnd(b);
  for (long f = 0; f < b; ++f) rnd[f] = U(rng);
  fam.push_back(rnd);
  return fam;
}

}  // namespace

TEST_CASE("recipe exponent arithmetic") {
  KernelProfile empty;
  empty.a_grid = {0.5, 1.0, 1.5, 2.0};
  empty.N_interior = {4, 2, 1.5, 1};
  empty.N_boundary = {4, 2, 1.5, 1};
  empty.N_laplace = {4, 2, 1.5, 1};
  empty.lap_p_moments = {1};

  SUBCASE("gradient interior (3,2,2,2)") {
    auto rec = holder_constant_bound(3, 2, 2, 2, empty, RecipeTarget::gradient_interior);
    CHECK(rec.b == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rec.exp1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rec.exp2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rec.a_split == doctest::Approx(1.0));
    CHECK(std::isinf(rec.q0));
    CHECK(rec.r0 == doctest::Approx(2.0));
    // bound = N(1) * N(1)^{q(p-1)/p} = 2 * 2, to the power 1/q
    CHECK(rec.certified_bound == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("gradient boundary (3,2,2,2)") {
    auto rec = holder_constant_bound(3, 2, 2, 2, empty, RecipeTarget::gradient_boundary);
    CHECK(rec.b == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(rec.exp2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rec.exp2 > 0);
    CHECK(rec.exp2 <= 2.0);
  }
  SUBCASE("laplace interior (3,2,2,2)") {
    auto rec = holder_constant_bound(3, 2, 2, 2, empty, RecipeTarget::laplace_interior);
    CHECK(rec.b == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rec.exp1 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rec.exp2 == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("p=1 limit branch") {
    auto rec = holder_constant_bound(3, 1, 1, 1, empty, RecipeTarget::gradient_interior);
    CHECK(rec.p_was_limit);
    CHECK(rec.effective_p == 1.0);  // direct Fubini at p=q=1
    CHECK(rec.certified_bound == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("hoelder identity 1/q + 1/q0 + 1/r0 = 1") {
    for (auto [n, p, q] : std::vector<std::array<double, 3>>{
             {3, 2, 3}, {3, 1.5, 2}, {2, 2, 2.5}}) {
      auto rec = holder_constant_bound(static_cast<int>(n), p, q, q, empty,
                                       RecipeTarget::gradient_interior);
      double lhs = 1 / rec.q + (std::isinf(rec.q0) ? 0 : 1 / rec.q0) + 1 / rec.r0;
      CHECK(lhs == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(rec.q * rec.a_split == doctest::Approx(p == 1 ? 1 + 1e-6 : p));
    }
  }
}

TEST_CASE("uniform bound sweeps stay finite and stable") {
  SUBCASE("ball3 analytic") {
    auto g = quick(GeomKind::ball3, {1.0}, 0.25);
    auto op = assemble(g);
    auto t = build_green_table(g, &op, default_sources(g, 12, 1));
    auto reps = verify_uniform_bounds(t);
    REQUIRE(reps.size() == 2);
    for (auto& r : reps) {
      CHECK(r.pair_count > 100);
      CHECK(std::isfinite(r.empirical_constant));
      CHECK(r.empirical_constant > 0);
    }
    // |G| d^{n-2} <= 1/((n-2) omega_{n-1}) = 1/(4 pi) for the ball
    CHECK(reps[0].empirical_constant <= 1.0 / (4 * M_PI) + 1e-12);
  }
  SUBCASE("disk log forms") {
    auto g = quick(GeomKind::disk, {1.0}, 0.1);
    auto op = assemble(g);
    auto t = build_green_table(g, &op, default_sources(g, 12, 1));
    for (auto& r : verify_uniform_bounds(t)) {
      CHECK(std::isfinite(r.empirical_constant));
    }
    for (auto& r : verify_boundary_refined_bounds(t)) {
      CHECK(std::isfinite(r.empirical_constant));
      CHECK(r.pair_count > 0);
    }
  }
  SUBCASE("torus one-sided forms") {
    auto g = quick(GeomKind::torus2, {1.0}, 0, 32);
    auto op = assemble(g);
    auto t = build_green_table(g, &op, default_sources(g, 8, 1), true,
                               TorusTableMode::ewald);
    auto reps = verify_uniform_bounds(t);
    REQUIRE(reps.size() == 3);
    for (auto& r : reps) CHECK(std::isfinite(r.empirical_constant));
  }
  SUBCASE("stability flag across a ladder") {
    auto runner = [&](double h) {
      auto g = quick(GeomKind::disk, {1.0}, h);
      auto op = assemble(g);
      auto t = build_green_table(g, &op, default_sources(g, 15, 1));
      return verify_uniform_bounds(t);
    };
    auto reps = bound_stability_study(runner, {0.2, 0.1, 0.05});
    for (auto& r : reps) {
      CHECK(r.refinement_series.size() == 3);
      CHECK(r.stable);
    }
  }
}

TEST_CASE("kernel profile shapes") {
  std::vector<double> a_grid = {0.1, 0.2, 0.4, 0.6, 0.8, 1.0};

  SUBCASE("ball3") {
    auto g = quick(GeomKind::ball3, {1.0}, 0.25);
    auto op = assemble(g);
    auto t = build_green_table(g, &op, default_sources(g, 10, 1));
    auto prof = kernel_lp_profile(t, a_grid);
    for (size_t i = 0; i < a_grid.size(); ++i) {
      CHECK(std::isfinite(prof.N_interior[i]));
      CHECK(prof.N_interior[i] * a_grid[i] <= prof.fitted_C_interior + 1e-12);
      CHECK(prof.shape_interior[i] <= 2 * prof.shape_C_interior);
      CHECK(prof.shape_interior[i] >= 0.5 * prof.shape_C_interior);
      CHECK(prof.shape_laplace[i] <= 2 * prof.shape_C_laplace);
      CHECK(prof.shape_laplace[i] >= 0.5 * prof.shape_C_laplace);
      if (i > 0) CHECK(prof.N_interior[i] <= prof.N_interior[i - 1] * 1.0001);
    }
    // a=1 exponent is exactly 1: N(1) = sup int |grad G|, finite
    CHECK(prof.N_interior.back() > 0);
  }
  SUBCASE("disk with p sweep") {
    auto g = quick(GeomKind::disk, {1.0}, 0.08);
    auto op = assemble(g);
    auto t = build_green_table(g, &op, default_sources(g, 10, 1));
    auto prof = kernel_lp_profile(t, a_grid);
    CHECK(prof.p_slope > 0.85);
    CHECK(prof.p_slope < 1.15);
    for (size_t i = 0; i < a_grid.size(); ++i) {
      CHECK(prof.shape_interior[i] <= 2 * prof.shape_C_interior);
      CHECK(prof.shape_interior[i] >= 0.5 * prof.shape_C_interior);
      CHECK(prof.shape_boundary[i] <= 2 * prof.shape_C_boundary);
      CHECK(prof.shape_boundary[i] >= 0.5 * prof.shape_C_boundary);
    }
  }
}

TEST_CASE("certified bounds dominate empirical operator ratios") {
  struct Cell {
    int n;
    double p, q, r;
  };
  std::vector<Cell> sweep = {{3, 2, 2, 2}, {3, 1, 1, 1}, {2, 1, 1, 1}, {2, 2, 2, 2}};
  for (auto cell : sweep) {
    GeometryHandle g = cell.n == 3 ? quick(GeomKind::ball3, {1.0}, 0.3)
                                   : quick(GeomKind::disk, {1.0}, 0.12);
    auto table = square_table(g);
    std::vector<double> a_grid = {0.25, 0.5, 1.0, 1.5, 2.0};
    auto prof = kernel_lp_profile(table, a_grid);
    auto vfam = volume_family(g, 7);
    auto bfam = boundary_family(g, 9);
    for (auto target : {RecipeTarget::gradient_interior,
                        RecipeTarget::gradient_boundary,
                        RecipeTarget::laplace_interior}) {
      CAPTURE(cell.n);
      CAPTURE(cell.p);
      CAPTURE(static_cast<int>(target));
      auto rec = holder_constant_bound(cell.n, cell.p, cell.q, cell.r, prof, target);
      auto ratio = empirical_operator_ratio(
          table, target, rec.effective_p, rec.effective_q,
          target == RecipeTarget::gradient_boundary ? bfam : vfam);
      CHECK(ratio.max_ratio > 0);
      CHECK(rec.certified_bound / ratio.max_ratio >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("annulus gradient scaling against closed forms") {
  auto rep2 = annulus_gradient_scaling(2, {0.1, 0.4});
  CHECK(rep2.exact_value == doctest::Approx(1 / std::log(2.0)));
  for (double v : rep2.sup_grad_times_r)
    CHECK(v == doctest::Approx(1 / std::log(2.0)).epsilon(0.02));

  auto rep3 = annulus_gradient_scaling(3, {0.1});
  for (double v : rep3.sup_grad_times_r)
    CHECK(v == doctest::Approx(2.0).epsilon(0.02));
}
