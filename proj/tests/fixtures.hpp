#ifndef PWAQ_TESTS_FIXTURES_HPP
#define PWAQ_TESTS_FIXTURES_HPP

#include <stdexcept>

#include "pwaq/model.hpp"
#include "pwaq/polytope.hpp"

namespace pwaq::testing {

// Cell regions of the bundled 6-mode 2-D benchmark system.
inline HPolytope sixmode_cell(int idx1based) {
  Mat U1(4, 2), U2(3, 2), U5(3, 2);
  U1 << 1, -1, 1, 1, -1, 0, 1, 0;
  U2 << 1, -1, -1, -1, 0, 1;
  U5 << 1, -1, 1, 1, -1, 0;
  Vec v1(4), v2(3), v5(3);
  v1 << 0, 0, 1, -0.3;
  v2 << 0, 0, 1;
  v5 << 0, 0, 0.3;
  switch (idx1based) {
    case 1: return HPolytope(U1, v1);
    case 2: return HPolytope(U2, v2);
    case 3: return HPolytope(-U1, v1);
    case 4: return HPolytope(-U2, v2);
    case 5: return HPolytope(U5, v5);
    case 6: return HPolytope(-U5, v5);
  }
  throw std::out_of_range("sixmode_cell");
}

inline HPolytope sixmode_total_space() {
  return HPolytope::box(Vec::Zero(2), 1.0);
}

inline PwaSystem sixmode_system() {
  PwaSystem sys;
  sys.state_dim = 2;
  sys.input_dim = 1;
  sys.disturbance_dim = 0;
  sys.total_space = sixmode_total_space();
  Mat A13(2, 2), A24(2, 2), A56(2, 2);
  A13 << 0.5, -0.4, 0, 2;
  A24 << 2, 0, -1, 1;
  A56 << 0.5, -0.1, 1, 2;
  Mat B1356(2, 1), B24(2, 1);
  B1356 << 0, 1;
  B24 << -1, 0.5;
  for (int i = 1; i <= 6; ++i) {
    Cell c;
    c.region = sixmode_cell(i);
    c.A = (i == 2 || i == 4) ? A24 : (i <= 3 ? A13 : A56);
    c.B = (i == 2 || i == 4) ? B24 : B1356;
    c.f = Vec::Zero(2);
    c.D = Mat::Zero(2, 0);
    sys.cells.push_back(c);
  }
  return sys;
}

// Gains shipped with the benchmark.
inline AffineController sixmode_controller() {
  AffineController ctrl;
  Mat K13(1, 2), K24(1, 2), K56(1, 2);
  K13 << -0.6140, -1.6368;
  K24 << 1.9995, -0.5244;
  K56 << -0.9980, -1.9967;
  for (int i = 1; i <= 6; ++i) {
    AffineController::Gain g;
    g.K = (i == 1 || i == 3) ? K13 : (i == 2 || i == 4) ? K24 : K56;
    g.g = Vec::Zero(1);
    ctrl.gains.push_back(g);
  }
  return ctrl;
}

inline UniformQuantizer sixmode_quantizer() { return {0.01, 1.5}; }

}  // namespace pwaq::testing

#include <random>
#include <set>

namespace pwaq::testing {

// Random 2-D system: the box [-1,1]^2 split into 2 or 3 bands along a
// random direction, mildly contracting dynamics, one disturbance column.
inline PwaSystem random_band_system(std::mt19937_64& rng,
                                    AffineController* ctrl_out = nullptr) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PwaSystem sys;
  sys.state_dim = 2;
  sys.input_dim = 1;
  sys.disturbance_dim = 1;
  sys.total_space = HPolytope::box(Vec::Zero(2), 1.0);

  const double ang = 3.14159265358979 * u(rng);
  Vec a(2);
  a << std::cos(ang), std::sin(ang);
  const int ncells = 2 + static_cast<int>(rng() % 2);
  std::vector<double> cuts;
  if (ncells == 2) {
    cuts = {0.6 * u(rng)};
  } else {
    double t1 = 0.6 * u(rng), t2 = 0.6 * u(rng);
    if (t1 > t2) std::swap(t1, t2);
    if (t2 - t1 < 0.2) t2 = t1 + 0.2;
    cuts = {t1, t2};
  }

  for (int c = 0; c <= static_cast<int>(cuts.size()); ++c) {
    Cell cell;
    HPolytope region = sys.total_space;
    if (c > 0)
      region = intersect(
          region, HPolytope((-a).transpose().eval(), Vec::Constant(1, -cuts[c - 1])));
    if (c < static_cast<int>(cuts.size()))
      region =
          intersect(region, HPolytope(a.transpose().eval(), Vec::Constant(1, cuts[c])));
    cell.region = region;
    Mat A(2, 2);
    A << u(rng), u(rng), u(rng), u(rng);
    A *= 0.6;
    cell.A = A;
    Mat B(2, 1);
    B << u(rng), u(rng);
    cell.B = B;
    cell.f = Vec::Zero(2);
    Mat D(2, 1);
    D << 0.5 * u(rng), 0.5 * u(rng);
    cell.D = D;
    sys.cells.push_back(cell);
  }
  if (ctrl_out) {
    ctrl_out->gains.clear();
    for (int i = 0; i < sys.num_cells(); ++i) {
      AffineController::Gain g;
      Mat K(1, 2);
      K << 0.3 * u(rng), 0.3 * u(rng);
      g.K = K;
      g.g = Vec::Zero(1);
      ctrl_out->gains.push_back(g);
    }
  }
  return sys;
}

// Successor modes found by stepping a dense grid of (x, d) pairs.
inline std::set<int> grid_successors(const PwaSystem& sys,
                                     const AffineController& ctrl, int i,
                                     double delta, Channel channel,
                                     double step = 1e-2) {
  std::set<int> out;
  const Mat Abar = sys.cells[i].A + sys.cells[i].B * ctrl.gains[i].K;
  const Vec fbar = sys.cells[i].f + sys.cells[i].B * ctrl.gains[i].g;
  Mat D;
  switch (channel) {
    case Channel::Physical: D = sys.cells[i].D; break;
    case Channel::InputQ: D = sys.cells[i].B; break;
    case Channel::StateQ: D = sys.cells[i].B * ctrl.gains[i].K; break;
  }
  const int dd = static_cast<int>(D.cols());
  std::vector<Vec> dgrid;
  if (dd == 0 || delta == 0.0) {
    dgrid.push_back(Vec::Zero(dd));
  } else {
    // per-axis grid; fine enough for the 1-2 dim channels used in tests
    std::vector<double> axis;
    for (double t = -delta; t <= delta + 1e-12; t += step)
      axis.push_back(std::min(t, delta));
    axis.push_back(delta);
    if (dd == 1) {
      for (double t : axis) dgrid.push_back(Vec::Constant(1, t));
    } else {
      for (double t1 : axis)
        for (double t2 : axis) {
          Vec d(2);
          d << t1, t2;
          dgrid.push_back(d);
        }
    }
  }
  const auto [lo, hi] = bounding_box(sys.cells[i].region);
  for (double x1 = lo[0]; x1 <= hi[0] + 1e-12; x1 += step)
    for (double x2 = lo[1]; x2 <= hi[1] + 1e-12; x2 += step) {
      Vec x(2);
      x << std::min(x1, hi[0]), std::min(x2, hi[1]);
      if (!contains(sys.cells[i].region, x, 0.0)) continue;
      for (const Vec& d : dgrid) {
        const Vec img = Abar * x + fbar + D * d;
        if (!contains(sys.total_space, img, kTieTol)) continue;
        out.insert(mode_of(sys, img));
      }
    }
  return out;
}

}  // namespace pwaq::testing

#endif
