#include "platoon/gains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {

void validate(const GainSet& g) {
  std::ostringstream err;
  if (!(g.ka > 0.0)) err << "gains.ka must be > 0 (got " << g.ka << "); ";
  if (!(g.kv > 0.0)) err << "gains.kv must be > 0 (got " << g.kv << "); ";
  if (!(g.kp > 0.0)) err << "gains.kp must be > 0 (got " << g.kp << "); ";
  if (!(g.hw > 0.0)) err << "gains.hw must be > 0 (got " << g.hw << "); ";
  if (g.r < 1) err << "topology.r must be >= 1 (got " << g.r << "); ";
  if (!err.str().empty()) throw ConfigError(err.str());
}

ScaledGains scale_gains(const GainSet& g) {
  const double r = g.r;
  return {r * g.ka, r * g.kv, r * g.kp, (r + 1.0) / 2.0 * g.hw};
}

GainSet unscale_gains(const ScaledGains& s, int r) {
  const double rr = r;
  return {s.ka / rr, s.kv / rr, s.kp / rr, r, s.hw * 2.0 / (rr + 1.0)};
}

namespace {

void require_scaled_ka(double scaled_ka) {
  if (!(scaled_ka > 0.0 && scaled_ka < 1.0)) {
    std::ostringstream os;
    os << "scaled acceleration gain r*ka = " << scaled_ka
       << " must lie in (0, 1)";
    throw InfeasibleGainError(os.str());
  }
}

}  // namespace

double headway_lower_bound(double tau0, double ka, int r) {
  require_scaled_ka(r * ka);
  return 4.0 * tau0 / ((1.0 + r) * (1.0 + r * ka));
}

RegionConstants region_constants(double ka, int r, double hw, double tau0) {
  const double kta = r * ka;
  require_scaled_ka(kta);
  const double htw = (r + 1.0) / 2.0 * hw;
  const double one_minus_sq = 1.0 - kta * kta;
  return {one_minus_sq / (2.0 * tau0), one_minus_sq / (2.0 * tau0 * htw),
          (1.0 - kta) / htw, 2.0 * (1.0 - kta) / (htw * htw)};
}

RegionReport region_check(const GainSet& g, double tau0) {
  const ScaledGains s = scale_gains(g);
  const RegionConstants c = region_constants(g.ka, g.r, g.hw, tau0);
  RegionReport rep;
  rep.margin1 = 1.0 - (s.kv / c.a1 + s.kp / c.b1);
  rep.margin2 = (s.kv / c.a2 + s.kp / c.b2) - 1.0;
  rep.feasible = rep.margin1 >= -kRegionSlack && rep.margin2 >= -kRegionSlack;
  return rep;
}

bool in_region(double ka, double kv, double kp, int r, double hw,
               double tau0) {
  if (kv < 0.0 || kp < 0.0) return false;
  return region_check({ka, kv, kp, r, hw}, tau0).feasible;
}

namespace {

using Point = std::pair<double, double>;

// Appends `samples` evenly spaced points from a to b, both ends included.
// The first point is skipped when it duplicates the current tail.
void append_segment(std::vector<Point>& out, Point a, Point b, int samples) {
  const int n = std::max(samples, 2);
  for (int k = 0; k < n; ++k) {
    if (k == 0 && !out.empty() && out.back() == a) continue;
    const double t = static_cast<double>(k) / (n - 1);
    out.emplace_back(a.first + t * (b.first - a.first),
                     a.second + t * (b.second - a.second));
  }
}

}  // namespace

RegionBoundary region_boundary(double ka, int r, double hw, double tau0,
                               int samples) {
  RegionBoundary out;
  const RegionConstants c = region_constants(ka, r, hw, tau0);

  if (!(c.a1 > c.a2)) {
    std::ostringstream os;
    os << "empty admissible region for r=" << r << ": hw=" << hw
       << " does not exceed the lower bound "
       << headway_lower_bound(tau0, ka, r);
    out.diagnostic = os.str();
    return out;
  }

  // Scaled-coordinate vertices; the region always contains the kv-axis
  // stretch [a2, a1].
  std::vector<Point> verts{{c.a2, 0.0}, {c.a1, 0.0}};
  std::vector<Point> pts;
  append_segment(pts, verts[0], verts[1], samples);
  if (c.b1 > c.b2) {
    // Lines do not cross in the quadrant: quadrilateral.
    verts.emplace_back(0.0, c.b1);
    verts.emplace_back(0.0, c.b2);
    append_segment(pts, verts[1], verts[2], samples);
    append_segment(pts, verts[2], verts[3], samples);
    append_segment(pts, verts[3], verts[0], samples);
  } else {
    const double det = 1.0 / (c.a1 * c.b2) - 1.0 / (c.a2 * c.b1);
    const Point cross{(1.0 / c.b2 - 1.0 / c.b1) / det,
                      (1.0 / c.a1 - 1.0 / c.a2) / det};
    verts.push_back(cross);
    append_segment(pts, verts[1], verts[2], samples);
    append_segment(pts, verts[2], verts[0], samples);
  }

  const double rr = r;
  for (auto& p : verts) p = {p.first / rr, p.second / rr};
  for (auto& p : pts) p = {p.first / rr, p.second / rr};
  out.vertices = std::move(verts);
  out.points = std::move(pts);
  return out;
}

TransferFunction TransferFunction::propagation(const GainSet& g, double tau) {
  TransferFunction tf;
  tf.num_ = {g.ka, g.kv, g.kp};
  const double gamma =
      g.r * g.kv + g.r * g.kp * (g.r + 1.0) / 2.0 * g.hw;
  tf.den_ = {tau, 1.0, gamma, g.r * g.kp};
  return tf;
}

namespace {

template <std::size_t N>
std::complex<double> horner(const std::array<double, N>& coeffs,
                            std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (double c : coeffs) acc = acc * s + c;
  return acc;
}

}  // namespace

std::complex<double> TransferFunction::operator()(
    std::complex<double> s) const {
  return horner(num_, s) / horner(den_, s);
}

HinfResult hinf_check(const TransferFunction& tf, int r, const HinfGrid& grid) {
  // r N(s) shares the constant r kp with D(s), so the DC gain is exactly 1.
  std::array<double, 3> rnum = tf.numerator();
  for (double& c : rnum) c *= r;
  const auto& den = tf.denominator();

  auto gain_at = [&](double w) {
    const std::complex<double> s{0.0, w};
    return std::abs(horner(rnum, s)) / std::abs(horner(den, s));
  };

  HinfResult res{gain_at(0.0), 0.0};
  const int n = std::max(grid.points, 2);
  const double lo = std::log(grid.omega_min);
  const double step = (std::log(grid.omega_max) - lo) / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double w = std::exp(lo + step * k);
    const double g = gain_at(w);
    if (g > res.max_gain) res = {g, w};
  }
  return res;
}

}  // namespace platoon
