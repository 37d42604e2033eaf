#include <cmath>
#include <complex>

#include "greenlab/green.hpp"

namespace greenlab {

double unit_sphere_area(int n) {
  return 2 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
}

double FundamentalSolution::phi(double r) const {
  if (n == 2) return std::log(r) / (2 * M_PI);
  return -std::pow(r, 2.0 - n) / ((n - 2) * unit_sphere_area(n));
}

double FundamentalSolution::dphi(double r) const {
  return std::pow(r, 1.0 - n) / unit_sphere_area(n);
}

FundamentalSolution fundamental_solution(int n) {
  if (n < 2) throw std::runtime_error("fundamental solution needs dimension >= 2");
  return FundamentalSolution{n};
}

double GreenOracle::poisson(const Point&, const Point&) const {
  throw std::runtime_error("no Poisson kernel for this geometry");
}

namespace {

// ---------------------------------------------------------------------------
// ball/disk of radius R: Kelvin image method

class BallOracle : public GreenOracle {
 public:
  BallOracle(int n, double R) : n_(n), R_(R), fs_{n} {}

  double value(const Point& x, const Point& y) const override {
    Point u = x / R_, v = y / R_;
    double r = (u - v).norm();
    if (r == 0) throw std::runtime_error("diagonal singularity");
    double rho = image_dist(u, v);
    double scale = n_ == 2 ? 1.0 : std::pow(R_, 2.0 - n_);
    return scale * (fs_.phi(r) - fs_.phi(rho));
  }

  Point grad_y(const Point& x, const Point& y) const override {
    Point u = x / R_, v = y / R_;
    double r = (u - v).norm();
    if (r == 0) throw std::runtime_error("diagonal singularity");
    double rho = image_dist(u, v);
    Point grad_r = (v - u) / r;
    Point grad_rho = (u.squaredNorm() * v - u) / rho;
    return std::pow(R_, 1.0 - n_) *
           (fs_.dphi(r) * grad_r - fs_.dphi(rho) * grad_rho);
  }

  double poisson(const Point& x, const Point& yb) const override {
    double d = (x - yb).norm();
    return (R_ * R_ - x.squaredNorm()) /
           (unit_sphere_area(n_) * R_ * std::pow(d, n_));
  }

 private:
  static double image_dist(const Point& u, const Point& v) {
    // |v| * |u - v/|v|^2| = sqrt(|u|^2 |v|^2 - 2 u.v + 1), symmetric in (u,v)
    return std::sqrt(
        std::max(u.squaredNorm() * v.squaredNorm() - 2 * u.dot(v) + 1.0, 0.0));
  }
  int n_;
  double R_;
  FundamentalSolution fs_;
};

// ---------------------------------------------------------------------------
// annulus a < |x| < b: radial-harmonic separation of variables.
//
// G = (1/2pi)[ ln(u/a)ln(v/b)/ln(b/a) + sum_{m>=1} cos(m dth) N_m / (m (1-q^{2m})) ]
// with u = min(|x|,|y|), v = max, q = a/b and
//   N_m = (uv/b^2)^m - (u/v)^m - (a^2 v / (b^2 u))^m + (a^2/(uv))^m.
// The 1/m part of each power sums in closed form (log kernels); the remainder
// carries q^{2m}/(1-q^{2m}) and converges geometrically at ratio q^2.

class AnnulusOracle : public GreenOracle {
 public:
  AnnulusOracle(double a, double b) : a_(a), b_(b), q2_(a * a / (b * b)) {}

  double value(const Point& x, const Point& y) const override {
    Polar px(x), py(y);
    double dth = py.th - px.th;
    double u = std::min(px.r, py.r), v = std::max(px.r, py.r);
    double g = std::log(u / a_) * std::log(v / b_) / std::log(b_ / a_);
    g += S0(t1(u, v), dth) - S0(t2(u, v), dth) - S0(t3(u, v), dth) + S0(t4(u, v), dth);
    double q2m = 1;
    for (int m = 1; m <= kMaxTerms; ++m) {
      q2m *= q2_;
      double corr = q2m / (1 - q2m);
      g += Nm(u, v, m) * std::cos(m * dth) * corr / m;
      if (corr * 4.0 / m < 1e-15) break;
    }
    return g / (2 * M_PI);
  }

  Point grad_y(const Point& x, const Point& y) const override {
    Polar px(x), py(y);
    double dth = py.th - px.th;
    bool y_is_outer = py.r >= px.r;
    double u = std::min(px.r, py.r), v = std::max(px.r, py.r);
    double T1 = t1(u, v), T2 = t2(u, v), T3 = t3(u, v), T4 = t4(u, v);

    double dg_drho;
    if (y_is_outer) {
      // dNm/dv = (m/v)[ T1^m + T2^m - T3^m - T4^m ]
      dg_drho = std::log(u / a_) / (v * std::log(b_ / a_)) +
                (S1(T1, dth) + S1(T2, dth) - S1(T3, dth) - S1(T4, dth)) / v;
      double q2m = 1;
      for (int m = 1; m <= kMaxTerms; ++m) {
        q2m *= q2_;
        double corr = q2m / (1 - q2m);
        double dN = std::pow(T1, m) + std::pow(T2, m) - std::pow(T3, m) -
                    std::pow(T4, m);
        dg_drho += dN * std::cos(m * dth) * corr / v;
        if (corr * 4.0 < 1e-15) break;
      }
    } else {
      // dNm/du = (m/u)[ T1^m - T2^m + T3^m - T4^m ]
      dg_drho = std::log(v / b_) / (u * std::log(b_ / a_)) +
                (S1(T1, dth) - S1(T2, dth) + S1(T3, dth) - S1(T4, dth)) / u;
      double q2m = 1;
      for (int m = 1; m <= kMaxTerms; ++m) {
        q2m *= q2_;
        double corr = q2m / (1 - q2m);
        double dN = std::pow(T1, m) - std::pow(T2, m) + std::pow(T3, m) -
                    std::pow(T4, m);
        dg_drho += dN * std::cos(m * dth) * corr / u;
        if (corr * 4.0 < 1e-15) break;
      }
    }
    double dg_dth = -(S2(T1, dth) - S2(T2, dth) - S2(T3, dth) + S2(T4, dth));
    {
      double q2m = 1;
      for (int m = 1; m <= kMaxTerms; ++m) {
        q2m *= q2_;
        double corr = q2m / (1 - q2m);
        dg_dth -= Nm(u, v, m) * std::sin(m * dth) * corr;
        if (corr * 4.0 < 1e-15) break;
      }
    }
    double c = std::cos(py.th), s = std::sin(py.th);
    Point rhat = make_point(c, s), that = make_point(-s, c);
    return (rhat * dg_drho + that * (dg_dth / py.r)) / (2 * M_PI);
  }

  double poisson(const Point& x, const Point& yb) const override {
    Polar pb(yb);
    bool outer = pb.r > 0.5 * (a_ + b_);
    Point g = grad_y(x, yb);
    Point nu = outer ? Point(yb / pb.r) : Point(-yb / pb.r);
    return g.dot(nu);
  }

 private:
  struct Polar {
    double r, th;
    explicit Polar(const Point& p) : r(p.norm()), th(std::atan2(p[1], p[0])) {}
  };
  double t1(double u, double v) const { return u * v / (b_ * b_); }
  double t2(double u, double v) const { return u / v; }
  double t3(double u, double v) const { return a_ * a_ * v / (b_ * b_ * u); }
  double t4(double u, double v) const { return a_ * a_ / (u * v); }
  double Nm(double u, double v, int m) const {
    return std::pow(t1(u, v), m) - std::pow(t2(u, v), m) - std::pow(t3(u, v), m) +
           std::pow(t4(u, v), m);
  }
  // sum t^m cos(m d)/m, sum t^m cos(m d), sum t^m sin(m d)
  static double S0(double t, double d) {
    return -0.5 * std::log(1 - 2 * t * std::cos(d) + t * t);
  }
  static double S1(double t, double d) {
    double den = 1 - 2 * t * std::cos(d) + t * t;
    return (t * std::cos(d) - t * t) / den;
  }
  static double S2(double t, double d) {
    double den = 1 - 2 * t * std::cos(d) + t * t;
    return t * std::sin(d) / den;
  }
  static constexpr int kMaxTerms = 400;
  double a_, b_, q2_;
};

// ---------------------------------------------------------------------------
// flat torus [0,L)^n: Ewald split. Real-space part is the screened kernel
// (E1 in 2D, erfc in 3D) over the 3^n nearest images; reciprocal part is the
// Gaussian-filtered lattice sum; the constant pins the cell mean to zero.

class TorusEwaldOracle : public GreenOracle {
 public:
  TorusEwaldOracle(int n, double L) : n_(n), L_(L), alpha_(5.0 / L) {
    double V = std::pow(L, n);
    c0_ = 1.0 / (4 * alpha_ * alpha_ * V);
    const int kmax = 11;  // exp(-(pi k/5)^2) < 1e-20 beyond
    std::vector<int> k(n, -kmax);
    while (true) {
      double k2 = 0;
      for (int d = 0; d < n; ++d) k2 += double(k[d]) * k[d];
      if (k2 > 0 && k2 <= double(kmax) * kmax) {
        Eigen::VectorXd kap(n);
        for (int d = 0; d < n; ++d) kap[d] = 2 * M_PI * k[d] / L;
        double ks = kap.squaredNorm();
        kappas_.push_back(kap);
        coefs_.push_back(-std::exp(-ks / (4 * alpha_ * alpha_)) / (ks * V));
      }
      int d = 0;
      while (d < n && ++k[d] > kmax) k[d++] = -kmax;
      if (d == n) break;
    }
  }

  double value(const Point& x, const Point& y) const override {
    Point d = min_image(y - x);
    if (d.norm() == 0) throw std::runtime_error("diagonal singularity");
    double g = c0_;
    for_images(d, [&](const Point& im) { g += g_short(im.norm()); });
    for (size_t i = 0; i < kappas_.size(); ++i) {
      double ph = 0;
      for (int dd = 0; dd < n_; ++dd) ph += kappas_[i][dd] * d[dd];
      g += coefs_[i] * std::cos(ph);
    }
    return g;
  }

  Point grad_y(const Point& x, const Point& y) const override {
    Point d = min_image(y - x);
    Point g = Point::Zero(n_);
    for_images(d, [&](const Point& im) {
      double r = im.norm();
      if (r > 0) g += (dg_short(r) / r) * im;
    });
    for (size_t i = 0; i < kappas_.size(); ++i) {
      double ph = 0;
      for (int dd = 0; dd < n_; ++dd) ph += kappas_[i][dd] * d[dd];
      for (int dd = 0; dd < n_; ++dd)
        g[dd] -= coefs_[i] * std::sin(ph) * kappas_[i][dd];
    }
    return g;
  }

 private:
  Point min_image(Point d) const {
    for (int i = 0; i < n_; ++i) {
      d[i] = std::fmod(d[i], L_);
      if (d[i] < -L_ / 2) d[i] += L_;
      if (d[i] >= L_ / 2) d[i] -= L_;
    }
    return d;
  }
  template <class F>
  void for_images(const Point& d, F&& f) const {
    std::vector<int> m(n_, -1);
    while (true) {
      Point im = d;
      for (int i = 0; i < n_; ++i) im[i] += m[i] * L_;
      f(im);
      int i = 0;
      while (i < n_ && ++m[i] > 1) m[i++] = -1;
      if (i == n_) break;
    }
  }
  double g_short(double r) const {
    double a2r2 = alpha_ * alpha_ * r * r;
    if (a2r2 > 700) return 0;
    if (n_ == 2) return std::expint(-a2r2) / (4 * M_PI);  // = -E1(a^2r^2)/4pi
    return -std::erfc(alpha_ * r) / (4 * M_PI * r);
  }
  double dg_short(double r) const {
    double e = std::exp(-alpha_ * alpha_ * r * r);
    if (n_ == 2) return e / (2 * M_PI * r);
    return (std::erfc(alpha_ * r) / (r * r) +
            2 * alpha_ / std::sqrt(M_PI) * e / r) /
           (4 * M_PI);
  }
  int n_;
  double L_, alpha_, c0_;
  std::vector<Eigen::VectorXd> kappas_;
  std::vector<double> coefs_;
};

// ---------------------------------------------------------------------------
// round sphere of radius R: G depends only on the polar angle,
// G = (1/4pi)(ln((1-cos th)/2) + 1), mean zero over the sphere.

class SphereOracle : public GreenOracle {
 public:
  explicit SphereOracle(double R) : R_(R) {}

  double value(const Point& x, const Point& y) const override {
    double c = cos_angle(x, y);
    if (c >= 1) throw std::runtime_error("diagonal singularity");
    return (std::log((1 - c) / 2) + 1) / (4 * M_PI);
  }

  Point grad_y(const Point& x, const Point& y) const override {
    double c = cos_angle(x, y);
    double th = std::acos(c);
    double dG = std::sin(th) / (1 - std::cos(th)) / (4 * M_PI);  // dG/dth
    // unit tangent at y pointing away from x along the great circle
    Eigen::Vector3d xv = x.head(3) / R_, yv = y.head(3) / R_;
    Eigen::Vector3d t = xv - xv.dot(yv) * yv;
    double tn = t.norm();
    Point out = Point::Zero(3);
    if (tn < 1e-300) return out;  // antipodal: gradient vanishes by symmetry
    t /= -tn;
    for (int i = 0; i < 3; ++i) out[i] = dG / R_ * t[i];
    return out;
  }

 private:
  double cos_angle(const Point& x, const Point& y) const {
    return std::clamp(x.dot(y) / (R_ * R_), -1.0, 1.0);
  }
  double R_;
};

}  // namespace

std::unique_ptr<GreenOracle> make_green_oracle(const GeometryHandle& g) {
  switch (g.spec.kind) {
    case GeomKind::disk:
      return std::make_unique<BallOracle>(2, g.spec.params[0]);
    case GeomKind::ball3:
      return std::make_unique<BallOracle>(3, g.spec.params[0]);
    case GeomKind::ball4:
      return std::make_unique<BallOracle>(4, g.spec.params[0]);
    case GeomKind::annulus2d:
      return std::make_unique<AnnulusOracle>(g.spec.params[0], g.spec.params[1]);
    case GeomKind::torus2:
      return std::make_unique<TorusEwaldOracle>(2, g.spec.params[0]);
    case GeomKind::torus3:
      return std::make_unique<TorusEwaldOracle>(3, g.spec.params[0]);
    case GeomKind::sphere2:
      return std::make_unique<SphereOracle>(g.spec.params[0]);
    case GeomKind::ellipse:
      return nullptr;  // corrector split only
  }
  return nullptr;
}

}  // namespace greenlab
