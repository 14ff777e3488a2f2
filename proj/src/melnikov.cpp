#include "twofold/melnikov.hpp"

#include "twofold/error.hpp"
#include "twofold/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace twofold {

Vec2 rev_defect(const FilippovModel& model, double theta, double t, const Vec2& z) {
  return model.g_minus(t + theta, z) + reflect(model.g_plus(-t + theta, reflect(z)));
}

namespace {

std::vector<double> step_breaks(const AnnulusOrbit& o) {
  std::vector<double> b;
  b.reserve(o.lower.dense.steps().size() + 1);
  for (const auto& s : o.lower.dense.steps()) b.push_back(s.t0);
  b.push_back(o.sigma_bar);
  if (b.front() != 0.0) b.insert(b.begin(), 0.0);
  return b;
}

Mat2 checked_inverse(const Mat2& y, double t) {
  const double det = y.determinant();
  if (std::abs(det) <= 1e-12) {
    std::ostringstream os;
    os << "det Y = " << det << " at t=" << t;
    throw Error(ErrorCode::SingularFundamentalMatrix, os.str());
  }
  return adjugate_inverse(y, det);
}

// Y(sigma_bar) int_0^sigma_bar Y(t)^-1 h(t, gamma(t)) dt over the lower arc.
template <class H>
QuadResult transported_integral(const AnnulusOrbit& o, const H& h, double tol_quad) {
  const auto breaks = step_breaks(o);
  auto integrand = [&](double t) -> Vec2 {
    const ode::State<6> s = o.lower.dense(t);
    const Vec2 z = s.head<2>();
    const Mat2 y = Eigen::Map<const Mat2>(s.data() + 2);
    return checked_inverse(y, t) * h(t, z);
  };
  return integrate_gk15(integrand, breaks, tol_quad);
}

}  // namespace

MelnikovValue melnikov_M(const FilippovModel& model, const AnnulusOrbit& orbit, double theta, double tol_quad) {
  const QuadResult q = transported_integral(
      orbit, [&](double t, const Vec2& z) { return rev_defect(model, theta, t, z); }, tol_quad);
  const Mat2 ys = orbit.Y(orbit.sigma_bar);
  const Vec2 f = model.f_minus(0.0, orbit.landing);
  MelnikovValue m;
  m.value = wedge(f, ys * q.value);
  m.error = f.norm() * ys.norm() * q.error;
  return m;
}

MelnikovValue melnikov_M(const FilippovModel& model, const AnnulusData& data, double theta, double x,
                         double tol_quad) {
  return melnikov_M(model, annulus_orbit(data, x), theta, tol_quad);
}

MelnikovGrid melnikov_grid(const FilippovModel& model, const AnnulusData& data, std::vector<double> thetas,
                           std::vector<double> xs, int jobs, double tol_quad) {
  MelnikovGrid g;
  g.thetas = std::move(thetas);
  g.xs = std::move(xs);
  const std::size_t nt = g.thetas.size(), nx = g.xs.size();
  g.values.assign(nt * nx, 0.0);
  g.errors.assign(nt * nx, 0.0);
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(nx)));
  std::vector<std::exception_ptr> failures(workers);
  auto work = [&](int w) {
    try {
      for (std::size_t j = w; j < nx; j += workers) {
        const AnnulusOrbit o = annulus_orbit(data, g.xs[j]);
        for (std::size_t i = 0; i < nt; ++i) {
          const MelnikovValue m = melnikov_M(model, o, g.thetas[i], tol_quad);
          g.values[i * nx + j] = m.value;
          g.errors[i * nx + j] = m.error;
        }
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return g;
}

MelnikovValue g_theta(const FilippovModel& model, const AnnulusData& data, double theta, double tol_quad) {
  const AnnulusOrbit& o = *data.cycle;
  const QuadResult q = transported_integral(
      o,
      [&](double t, const Vec2& z) {
        return Vec2(model.g_minus(t + theta, z) - reflect(model.g_plus(-t + theta, reflect(z))));
      },
      tol_quad);
  const Mat2 ys = o.Y(o.sigma_bar);
  MelnikovValue m;
  m.value = ys.row(1).dot(q.value);
  m.error = ys.row(1).norm() * q.error;
  return m;
}

FoldShift fold_shift(const FilippovModel& model, const AnnulusData& data, double theta) {
  auto slope = [&](Side s, const Vec2& p) {
    const double d = model.f(s).jacobian(0.0, p)(1, 0);
    if (std::abs(d) <= data.tol.tangency) {
      throw Error(ErrorCode::DegenerateTangency, "dF2/dx vanishes at x=" + std::to_string(p.x()));
    }
    return d;
  };
  FoldShift fs;
  fs.nu_v_minus = -model.g_minus(theta, data.p_v).y() / slope(Side::Minus, data.p_v);
  fs.nu_v_plus = -model.g_plus(theta, data.p_v).y() / slope(Side::Plus, data.p_v);
  fs.nu_i_minus = -model.g_minus(theta, data.p_i).y() / slope(Side::Minus, data.p_i);
  fs.nu_i_plus = -model.g_plus(theta, data.p_i).y() / slope(Side::Plus, data.p_i);
  return fs;
}

double perturbed_fold(const FilippovModel& model, Side side, double theta, double x_guess) {
  double x = x_guess;
  for (int it = 0; it < 60; ++it) {
    const Vec2 z(x, 0.0);
    const double f = model.field(side, theta, z).y();
    const double df = model.jacobian(side, theta, z)(1, 0);
    if (df == 0.0) break;
    const double dx = f / df;
    x -= dx;
    if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) return x;
  }
  if (std::abs(model.field(side, theta, Vec2(x, 0.0)).y()) > 1e-12) {
    throw Error(ErrorCode::DegenerateTangency, "perturbed fold not found near x=" + std::to_string(x_guess));
  }
  return x;
}

double twofold_prefactor(const AnnulusData& data) {
  return 2.0 * data.F2_qv / (data.folds.F1_v * data.folds.dF2dx_v);
}

double twofold_threshold(const FilippovModel& model, const AnnulusData& data, double theta) {
  const double gp = model.g_plus(theta, data.p_v).y();
  const double gm = model.g_minus(theta, data.p_v).y();
  return twofold_prefactor(data) * std::max(gp, gm);
}

}  // namespace twofold
