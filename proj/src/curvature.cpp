#include "gausscurv/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "gausscurv/error.hpp"
#include "gausscurv/quadrature.hpp"

namespace gcurv {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Domain: return "out-of-domain error";
    case ErrorKind::NumericTolerance: return "numeric-tolerance error";
    case ErrorKind::NonConvergence: return "nonconvergence error";
    case ErrorKind::Contract: return "contract violation";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Normalization: return "normalization error";
    case ErrorKind::IllConditionedTail: return "ill-conditioned-tail error";
    case ErrorKind::Integration: return "integration error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

int status_class(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter:
    case ErrorKind::Domain:
    case ErrorKind::Contract:
      return 2;
    case ErrorKind::NumericTolerance:
    case ErrorKind::NonConvergence:
    case ErrorKind::Normalization:
    case ErrorKind::IllConditionedTail:
    case ErrorKind::Integration:
    case ErrorKind::Range:
      return 3;
    case ErrorKind::Config:
    case ErrorKind::Io:
      return 4;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Cutoff profile

namespace {

double bump_kernel(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return std::exp(-1.0 / (s * (1.0 - s)));
}

// Integral of the bump kernel over [0, s] for s <= 1/2.
double bump_primitive(double s) {
  static const GaussRule& rule = gauss_legendre(40);
  if (s <= 0.0) return 0.0;
  return integrate(rule, 0.0, s, bump_kernel);
}

double bump_total() {
  static const double total = 2.0 * bump_primitive(0.5);
  return total;
}

// Normalized smooth step: 0 at s <= 0, 1 at s >= 1.
double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  if (s <= 0.5) return bump_primitive(s) / bump_total();
  return 1.0 - bump_primitive(1.0 - s) / bump_total();
}

}  // namespace

double eta0(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  return smooth_step(2.0 * (1.0 - t));
}

double eta0_disk_moment(double p) {
  auto compute = [](double power) {
    const GaussRule& rule = gauss_legendre(48);
    double transition = 0.0;
    for (int piece = 0; piece < 4; ++piece) {
      const double a = 0.5 + 0.125 * piece;
      transition += integrate(rule, a, a + 0.125,
                              [&](double t) { return t * std::pow(eta0(t), power); });
    }
    return kTwoPi * (0.125 + transition);
  };
  static std::mutex guard;
  static std::map<double, double> cache;
  std::lock_guard lock(guard);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, compute(p)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Grid samples

GridSamples parse_grid_samples(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::vector<std::array<double, 3>> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::array<double, 3> v{};
    if (!(row >> v[0] >> v[1] >> v[2])) {
      fail(ErrorKind::Parameter, "grid samples: malformed row at line " + std::to_string(line_no));
    }
    rows.push_back(v);
  }
  if (rows.empty()) fail(ErrorKind::Parameter, "grid samples: no data rows");

  GridSamples g;
  for (const auto& r : rows) {
    g.xs.push_back(r[0]);
    g.ys.push_back(r[1]);
  }
  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(g.xs);
  unique_sorted(g.ys);
  if (g.xs.size() < 2 || g.ys.size() < 2 || rows.size() != g.xs.size() * g.ys.size()) {
    fail(ErrorKind::Parameter, "grid samples: rows do not form a full rectangular grid");
  }
  g.values.assign(rows.size(), std::nan(""));
  for (const auto& r : rows) {
    const auto ix = std::lower_bound(g.xs.begin(), g.xs.end(), r[0]) - g.xs.begin();
    const auto iy = std::lower_bound(g.ys.begin(), g.ys.end(), r[1]) - g.ys.begin();
    auto& slot = g.values[iy * g.xs.size() + ix];
    if (!std::isnan(slot)) fail(ErrorKind::Parameter, "grid samples: duplicate grid point");
    slot = r[2];
  }
  return g;
}

GridSamples read_grid_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open grid sample file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_grid_samples(buf.str());
}

// ---------------------------------------------------------------------------
// CurvatureField

const char* to_string(CurvatureKind kind) {
  switch (kind) {
    case CurvatureKind::RadialPower: return "radial_power";
    case CurvatureKind::ExactFamily: return "exact_family";
    case CurvatureKind::BumpSum: return "k0";
    case CurvatureKind::GridSampled: return "grid_sampled";
  }
  return "unknown";
}

double BumpSpec::radius() const { return std::exp(log_radius); }

struct CurvatureField::State {
  CurvatureKind kind = CurvatureKind::RadialPower;
  double amplitude = 1.0;
  double ell = 4.0;
  double q = 2.0;
  double alpha = 1.0;
  int n_max = 0;
  double log_scale = 0.0;
  std::vector<BumpSpec> bumps;
  GridSamples grid;
};

CurvatureField::CurvatureField(std::shared_ptr<const State> state) : state_(std::move(state)) {}

CurvatureField CurvatureField::radial_power(double amplitude, double ell) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    fail(ErrorKind::Parameter, "radial_power: amplitude must be positive");
  }
  if (!(ell > 2.0) || !std::isfinite(ell)) {
    fail(ErrorKind::Parameter, "radial_power: ell must exceed 2");
  }
  auto s = std::make_shared<State>();
  s->kind = CurvatureKind::RadialPower;
  s->amplitude = amplitude;
  s->ell = ell;
  return CurvatureField(std::move(s));
}

CurvatureField CurvatureField::exact_family(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    fail(ErrorKind::Parameter, "exact_family: alpha must be positive");
  }
  auto s = std::make_shared<State>();
  s->kind = CurvatureKind::ExactFamily;
  s->alpha = alpha;
  return CurvatureField(std::move(s));
}

CurvatureField CurvatureField::bump_sum(double ell, double q, int n_max) {
  if (!(q > 1.0)) fail(ErrorKind::Parameter, "k0: q must exceed 1 (got q = " + std::to_string(q) + ")");
  if (!(ell > q)) {
    fail(ErrorKind::Parameter, "k0: ell must exceed q (got ell = " + std::to_string(ell) +
                                   ", q = " + std::to_string(q) + ")");
  }
  if (n_max < 2) fail(ErrorKind::Parameter, "k0: n_max must be at least 2");
  auto s = std::make_shared<State>();
  s->kind = CurvatureKind::BumpSum;
  s->ell = ell;
  s->q = q;
  s->n_max = n_max;
  for (int n = 2; n <= n_max; ++n) {
    BumpSpec b;
    b.index = n;
    b.center = {static_cast<double>(n), 0.0};
    const double nq = std::pow(static_cast<double>(n), q);
    b.log_radius = -nq;
    b.log_amplitude = 2.0 * nq - ell * std::log(static_cast<double>(n));
    if (!(b.log_radius < std::log(0.25))) {
      fail(ErrorKind::Parameter, "k0: bump radius must stay below 1/4");
    }
    s->bumps.push_back(b);
  }
  return CurvatureField(std::move(s));
}

CurvatureField CurvatureField::grid_sampled(GridSamples samples) {
  const auto nx = samples.xs.size();
  const auto ny = samples.ys.size();
  if (nx < 2 || ny < 2 || samples.values.size() != nx * ny) {
    fail(ErrorKind::Parameter, "grid_sampled: inconsistent sample grid");
  }
  for (std::size_t i = 1; i < nx; ++i) {
    if (!(samples.xs[i] > samples.xs[i - 1])) fail(ErrorKind::Parameter, "grid_sampled: xs not increasing");
  }
  for (std::size_t i = 1; i < ny; ++i) {
    if (!(samples.ys[i] > samples.ys[i - 1])) fail(ErrorKind::Parameter, "grid_sampled: ys not increasing");
  }
  bool any_negative = false;
  for (double v : samples.values) {
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "grid_sampled: non-finite sample");
    any_negative = any_negative || v < 0.0;
  }
  if (!any_negative) fail(ErrorKind::Parameter, "grid_sampled: curvature is identically zero");
  auto s = std::make_shared<State>();
  s->kind = CurvatureKind::GridSampled;
  s->grid = std::move(samples);
  return CurvatureField(std::move(s));
}

CurvatureField CurvatureField::scaled(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::Parameter, "scale factor must be positive");
  auto s = std::make_shared<State>(*state_);
  s->log_scale += std::log(lambda);
  return CurvatureField(std::move(s));
}

CurvatureKind CurvatureField::kind() const { return state_->kind; }

bool CurvatureField::is_radial() const {
  return state_->kind == CurvatureKind::RadialPower || state_->kind == CurvatureKind::ExactFamily;
}

double CurvatureField::radial(double r) const {
  const State& s = *state_;
  const double scale = std::exp(s.log_scale);
  switch (s.kind) {
    case CurvatureKind::RadialPower:
      return -scale * s.amplitude * std::pow(1.0 + r * r, -0.5 * s.ell);
    case CurvatureKind::ExactFamily:
      return -scale * 2.0 * s.alpha * std::pow(1.0 + r * r, -(2.0 + s.alpha));
    default:
      fail(ErrorKind::Contract, std::string("radial profile requested for non-radial field ") + describe());
  }
}

double CurvatureField::eval_local(int slot, Point2 z) const {
  const State& s = *state_;
  if (s.kind != CurvatureKind::BumpSum || slot < 0 || slot >= static_cast<int>(s.bumps.size())) {
    fail(ErrorKind::Contract, "eval_local: no such bump");
  }
  const double e = eta0(norm(z));
  if (e == 0.0) return 0.0;
  return -std::exp(s.bumps[slot].log_amplitude + s.log_scale) * e;
}

int CurvatureField::bump_slot_containing(Point2 x) const {
  const State& s = *state_;
  if (s.kind != CurvatureKind::BumpSum) return -1;
  const long n = std::lround(x.x);
  if (n < 2 || n > s.n_max) return -1;
  const BumpSpec& b = s.bumps[n - 2];
  const double d = std::hypot(x.x - b.center.x, x.y);
  return d < b.radius() ? static_cast<int>(n - 2) : -1;
}

namespace {

double bilinear(const GridSamples& g, Point2 x) {
  const auto nx = g.xs.size();
  auto ix = std::upper_bound(g.xs.begin(), g.xs.end(), x.x) - g.xs.begin() - 1;
  auto iy = std::upper_bound(g.ys.begin(), g.ys.end(), x.y) - g.ys.begin() - 1;
  ix = std::clamp<long>(ix, 0, static_cast<long>(nx) - 2);
  iy = std::clamp<long>(iy, 0, static_cast<long>(g.ys.size()) - 2);
  const double tx = (x.x - g.xs[ix]) / (g.xs[ix + 1] - g.xs[ix]);
  const double ty = (x.y - g.ys[iy]) / (g.ys[iy + 1] - g.ys[iy]);
  const double v00 = g.values[iy * nx + ix];
  const double v10 = g.values[iy * nx + ix + 1];
  const double v01 = g.values[(iy + 1) * nx + ix];
  const double v11 = g.values[(iy + 1) * nx + ix + 1];
  const double v = (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
  return std::min(v, 0.0);
}

bool inside(const GridSamples& g, Point2 x) {
  return x.x >= g.xs.front() && x.x <= g.xs.back() && x.y >= g.ys.front() && x.y <= g.ys.back();
}

}  // namespace

double CurvatureField::operator()(Point2 x) const {
  const State& s = *state_;
  switch (s.kind) {
    case CurvatureKind::RadialPower:
    case CurvatureKind::ExactFamily:
      return radial(norm(x));
    case CurvatureKind::BumpSum: {
      const long n = std::lround(x.x);
      if (n < 2 || n > s.n_max) return 0.0;
      const BumpSpec& b = s.bumps[n - 2];
      const double d = std::hypot(x.x - b.center.x, x.y);
      const double r = b.radius();
      if (d >= r) return 0.0;
      return -std::exp(b.log_amplitude + s.log_scale) * eta0(d / r);
    }
    case CurvatureKind::GridSampled:
      if (!inside(s.grid, x)) {
        fail(ErrorKind::Domain, "grid_sampled: query (" + std::to_string(x.x) + ", " +
                                    std::to_string(x.y) + ") outside sampled domain");
      }
      return std::exp(s.log_scale) * bilinear(s.grid, x);
  }
  return 0.0;
}

double CurvatureField::eval_extended(Point2 x) const {
  if (state_->kind == CurvatureKind::GridSampled && !inside(state_->grid, x)) return 0.0;
  return (*this)(x);
}

double CurvatureField::amplitude() const { return state_->amplitude * std::exp(state_->log_scale); }
double CurvatureField::ell() const { return state_->ell; }
double CurvatureField::q() const { return state_->q; }
double CurvatureField::family_alpha() const { return state_->alpha; }
int CurvatureField::n_max() const { return state_->n_max; }
double CurvatureField::log_scale() const { return state_->log_scale; }
std::span<const BumpSpec> CurvatureField::bumps() const { return state_->bumps; }
const GridSamples* CurvatureField::grid() const {
  return state_->kind == CurvatureKind::GridSampled ? &state_->grid : nullptr;
}

double CurvatureField::truncation_mass_bound() const {
  const State& s = *state_;
  if (s.kind != CurvatureKind::BumpSum) return 0.0;
  const double next = s.n_max + 1.0;
  const double tail = std::pow(next, -s.ell) + std::pow(next, 1.0 - s.ell) / (s.ell - 1.0);
  return std::exp(s.log_scale) * eta0_disk_moment(1.0) * tail;
}

std::string CurvatureField::describe() const {
  const State& s = *state_;
  std::ostringstream out;
  out << to_string(s.kind) << "(";
  switch (s.kind) {
    case CurvatureKind::RadialPower: out << "A=" << s.amplitude << ", ell=" << s.ell; break;
    case CurvatureKind::ExactFamily: out << "alpha=" << s.alpha; break;
    case CurvatureKind::BumpSum: out << "ell=" << s.ell << ", q=" << s.q << ", n_max=" << s.n_max; break;
    case CurvatureKind::GridSampled: out << s.grid.xs.size() << "x" << s.grid.ys.size(); break;
  }
  if (s.log_scale != 0.0) out << ", scale=" << std::exp(s.log_scale);
  out << ")";
  return out.str();
}

bool CurvatureField::same_as(const CurvatureField& other) const {
  if (state_ == other.state_) return true;
  const State& a = *state_;
  const State& b = *other.state_;
  return a.kind == b.kind && a.amplitude == b.amplitude && a.ell == b.ell && a.q == b.q &&
         a.alpha == b.alpha && a.n_max == b.n_max && a.log_scale == b.log_scale &&
         a.grid.xs == b.grid.xs && a.grid.ys == b.grid.ys && a.grid.values == b.grid.values;
}

// ---------------------------------------------------------------------------

double ExactFamily::reference_radial(double r) const { return 0.5 * alpha * std::log1p(r * r); }
double ExactFamily::reference(Point2 x) const { return reference_radial(norm(x)); }
double ExactFamily::total_curvature() const { return -2.0 * alpha * kPi; }

ExactFamily make_exact_family(double alpha) {
  return ExactFamily{alpha, CurvatureField::exact_family(alpha)};
}

CurvatureField make_k0(double ell, double q, int n_max) { return CurvatureField::bump_sum(ell, q, n_max); }

}  // namespace gcurv
