#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "charsys.hpp"
#include "kl.hpp"
#include "scheme.hpp"

namespace lbstab {

// Time-domain run of the relax-then-transport scheme on the half-line
// j = 0..points-1. One ghost cell on the left is filled from post-relaxation
// interior data plus the boundary source; on the right, populations entering
// from outside are set to zero so outgoing waves leave without a kinetic echo.

struct SimConfig {
  int points = 100;
  long double finalTime = 1.0L;
  // optional initial moments, size points x q; zero data when empty
  std::vector<std::vector<long double>> initial;

  long double dx() const { return 1.0L / points; }
};

struct Trajectory {
  int q = 0, points = 0;
  long double dx = 0, dt = 0, lambda = 1;
  // snapshots[n] holds the moment field at step n, laid out j * q + component
  std::vector<std::vector<double>> snapshots;
  std::vector<std::vector<long double>> linf, l2;  // per step, per component
  bool truncated = false;  // growth guard tripped before finalTime
  std::string warning;

  int steps() const { return static_cast<int>(snapshots.size()) - 1; }

  double at(int n, int j, int k) const {
    return snapshots[static_cast<std::size_t>(n)]
                    [static_cast<std::size_t>(j) * static_cast<std::size_t>(q) +
                     static_cast<std::size_t>(k)];
  }

  // distribution-function view of one cell, recovered through M^{-1}
  std::vector<double> distributions(int n, int j) const {
    std::vector<double> f(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
      long double acc = 0;
      for (int k = 0; k < q; ++k)
        acc += minv[static_cast<std::size_t>(i) * static_cast<std::size_t>(q) +
                    static_cast<std::size_t>(k)] *
               at(n, j, k);
      f[static_cast<std::size_t>(i)] = static_cast<double>(acc);
    }
    return f;
  }

  std::vector<long double> minv;  // row-major M^{-1}, set by the runner
};

// One-step driver. Keeps populations between steps; moments are produced on
// demand. Exposed separately from run() so probes can accumulate their own
// statistics without storing a trajectory.
class HalfLineSim {
 public:
  HalfLineSim(const SchemeSpec& spec, const BoundarySpec& bc, int points)
      : q_(spec.q), n_(points), pi_(incoming_index(spec)) {
    spec.validate();
    bc.validate(spec);
    if (points < 4) throw SchemeError("need at least 4 grid points");
    if (bc.stencil_width() >= points)
      throw SchemeError("ghost fill reads past the right edge of the grid");
    vel_ = spec.velocities;
    RatMat A = spec.M.inverse() * relaxation_matrix(spec) * spec.M;
    RatMat Minv = spec.M.inverse();
    relax_.resize(static_cast<std::size_t>(q_) * q_);
    m_.resize(static_cast<std::size_t>(q_) * q_);
    minv_.resize(static_cast<std::size_t>(q_) * q_);
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j) {
        relax_[idx(i, j)] = static_cast<long double>(A(i, j));
        m_[idx(i, j)] = static_cast<long double>(spec.M(i, j));
        minv_[idx(i, j)] = static_cast<long double>(Minv(i, j));
      }
    for (const auto& w : bc.weights)
      if (w.i == pi_ && w.j == 1 && w.value != 0)
        fill_.push_back({w.l, w.h, static_cast<long double>(w.value)});
    bc_ = bc;
    f_.assign(static_cast<std::size_t>(n_) * q_, 0.0L);
    fs_.assign(f_.size(), 0.0L);
    fn_.assign(f_.size(), 0.0L);
  }

  int q() const { return q_; }
  int points() const { return n_; }

  void set_moments(int j, const std::vector<long double>& m) {
    for (int i = 0; i < q_; ++i) {
      long double acc = 0;
      for (int k = 0; k < q_; ++k) acc += minv_[idx(i, k)] * m[static_cast<std::size_t>(k)];
      f_[cell(j) + static_cast<std::size_t>(i)] = acc;
    }
  }

  // relax everywhere, fill the ghost from post-relaxation data plus g^n,
  // shift along velocities, zero the populations entering from the right
  void step(long n) {
    for (int j = 0; j < n_; ++j) {
      const long double* in = f_.data() + cell(j);
      long double* out = fs_.data() + cell(j);
      for (int i = 0; i < q_; ++i) {
        long double acc = 0;
        for (int k = 0; k < q_; ++k) acc += relax_[idx(i, k)] * in[k];
        out[i] = acc;
      }
    }
    long double ghost = source(n);
    for (const auto& w : fill_)
      ghost += w.value * fs_[cell(w.h) + static_cast<std::size_t>(w.l)];
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < q_; ++i) {
        int srcj = j - vel_[static_cast<std::size_t>(i)];
        long double v;
        if (srcj < 0)
          v = i == pi_ ? ghost : 0.0L;
        else if (srcj >= n_)
          v = 0.0L;
        else
          v = fs_[cell(srcj) + static_cast<std::size_t>(i)];
        fn_[cell(j) + static_cast<std::size_t>(i)] = v;
      }
    f_.swap(fn_);
  }

  // moment field of the current state, laid out j * q + component
  void moments(std::vector<long double>& out) const {
    out.assign(f_.size(), 0.0L);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < q_; ++i) {
        long double acc = 0;
        for (int k = 0; k < q_; ++k) acc += m_[idx(i, k)] * f_[cell(j) + static_cast<std::size_t>(k)];
        out[cell(j) + static_cast<std::size_t>(i)] = acc;
      }
  }

  void boundary_moments(std::vector<long double>& out) const {
    out.assign(static_cast<std::size_t>(q_), 0.0L);
    for (int i = 0; i < q_; ++i)
      for (int k = 0; k < q_; ++k) out[static_cast<std::size_t>(i)] += m_[idx(i, k)] * f_[static_cast<std::size_t>(k)];
  }

  long double source(long n) const { return static_cast<long double>(bc_.source_value(n)); }

  const std::vector<long double>& minv() const { return minv_; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(j);
  }
  std::size_t cell(int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(q_);
  }

  struct Fill {
    int l = 0, h = 0;
    long double value = 0;
  };

  int q_, n_, pi_;
  std::vector<int> vel_;
  std::vector<long double> relax_, m_, minv_;
  std::vector<Fill> fill_;
  BoundarySpec bc_;
  std::vector<long double> f_, fs_, fn_;
};

inline Trajectory run(const SchemeSpec& spec, const BoundarySpec& bc, const SimConfig& cfg) {
  HalfLineSim sim(spec, bc, cfg.points);
  long double lambda = static_cast<long double>(spec.lambda);
  long double dx = cfg.dx();
  long double dt = dx / lambda;
  long steps = std::lround(static_cast<double>(cfg.finalTime / dt));
  if (steps < 1) steps = 1;

  if (!cfg.initial.empty()) {
    if (static_cast<int>(cfg.initial.size()) != cfg.points)
      throw SchemeError("initial data must provide one moment vector per point");
    for (int j = 0; j < cfg.points; ++j)
      sim.set_moments(j, cfg.initial[static_cast<std::size_t>(j)]);
  }

  Trajectory traj;
  traj.q = spec.q;
  traj.points = cfg.points;
  traj.dx = dx;
  traj.dt = dt;
  traj.lambda = lambda;
  traj.minv = sim.minv();
  if (2 * lambda * cfg.finalTime > 1)
    traj.warning = "outgoing waves can cross the grid and return within the run window";

  std::vector<long double> m;
  auto record = [&]() {
    sim.moments(m);
    std::vector<double> snap(m.size());
    std::vector<long double> li(static_cast<std::size_t>(spec.q), 0.0L);
    std::vector<long double> l2(static_cast<std::size_t>(spec.q), 0.0L);
    long double peak = 0;
    for (int j = 0; j < cfg.points; ++j)
      for (int k = 0; k < spec.q; ++k) {
        std::size_t p = static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.q) +
                        static_cast<std::size_t>(k);
        long double v = m[p];
        snap[p] = static_cast<double>(v);
        long double av = std::abs(v);
        if (av > li[static_cast<std::size_t>(k)]) li[static_cast<std::size_t>(k)] = av;
        l2[static_cast<std::size_t>(k)] += v * v;
        if (av > peak) peak = av;
      }
    for (int k = 0; k < spec.q; ++k)
      l2[static_cast<std::size_t>(k)] = std::sqrt(dx * l2[static_cast<std::size_t>(k)]);
    traj.snapshots.push_back(std::move(snap));
    traj.linf.push_back(std::move(li));
    traj.l2.push_back(std::move(l2));
    return peak;
  };

  record();
  for (long n = 0; n < steps; ++n) {
    sim.step(n);
    if (record() > 1e100L) {
      traj.truncated = true;  // geometric blowup: stop before overflow
      break;
    }
  }
  return traj;
}

// Largest residual of the scalar multi-step recursion generated by the full
// characteristic polynomial, applied to the conserved moment over interior
// points. jMin defaults to a band wide enough that every matrix row used in
// eliminating the other moments is a bulk row.
inline long double characteristic_recursion_check(const Trajectory& traj, const CharSystem& cs,
                                                  int jMin = -1, int nMin = 0) {
  const int q = traj.q;
  if (traj.steps() < q) throw SchemeError("need at least q + 1 snapshots");
  BiPoly full = cs.full();
  int width = full.deg();
  if (jMin < 0) jMin = cs.rBar() + (q - 1) * width;
  if (jMin < cs.rBar()) jMin = cs.rBar();
  std::vector<std::vector<long double>> c(static_cast<std::size_t>(width) + 1);
  for (int k = 0; k <= width; ++k) {
    const RatPoly& pk = full.coeff(k);
    for (int t = 0; t <= pk.deg(); ++t)
      c[static_cast<std::size_t>(k)].push_back(static_cast<long double>(pk.coeff(t)));
  }
  long double worst = 0;
  for (int n = nMin; n + q <= traj.steps(); ++n)
    for (int j = jMin; j + width - cs.rBar() < traj.points; ++j) {
      long double acc = 0;
      for (int k = 0; k <= width; ++k)
        for (std::size_t t = 0; t < c[static_cast<std::size_t>(k)].size(); ++t)
          acc += c[static_cast<std::size_t>(k)][t] *
                 traj.at(n + static_cast<int>(t), j + k - cs.rBar(), 0);
      if (std::abs(acc) > worst) worst = std::abs(acc);
    }
  return worst;
}

// Weighted input/output ratios probing for a stability constant: for each
// alpha the boundary trace and the datum are summed against exp(-2 alpha n dt).
// ratioAll uses the whole moment vector at j = 0, ratioFirst the conserved
// moment only. A bounded ratio over a decade sweep of alpha dt backs a strong
// stability claim; a diverging one refutes it.
struct SsRatioRow {
  long double alphaDt = 0;  // alpha * dt, the dimensionless decay per step
  long double ratioAll = 0;
  long double ratioFirst = 0;
  bool weightsDecayed = true;
};

inline std::vector<SsRatioRow> ss_ratio_probe(const SchemeSpec& spec, const BoundarySpec& bc,
                                              SourceKind kind,
                                              const std::vector<long double>& alphaDts) {
  BoundarySpec probe = bc;
  probe.source = kind;
  std::vector<SsRatioRow> table;
  for (long double a : alphaDts) {
    if (!(a > 0)) throw SchemeError("alpha dt must be positive");
    long steps = static_cast<long>(std::ceil(18.0L / a));
    int points = static_cast<int>(std::min<long>(steps / 2 + 8, 200000));
    if (points < 8) points = 8;
    HalfLineSim sim(spec, probe, points);
    std::vector<long double> trace;
    long double out1 = 0, outAll = 0, in = 0, lastAll = 0, peakAll = 0;
    for (long n = 0; n < steps; ++n) {
      long double w = std::exp(-2.0L * a * static_cast<long double>(n));
      long double g = sim.source(n);
      in += w * g * g;
      sim.step(n);
      sim.boundary_moments(trace);
      long double s = 0;
      for (long double v : trace) s += v * v;
      // the trace after step n answers the datum fed in at step n; weighting
      // them alike keeps the one-step latency out of the ratio at large alpha
      outAll += w * s;
      out1 += w * trace[0] * trace[0];
      lastAll = w * s;
      if (w * s > peakAll) peakAll = w * s;
    }
    SsRatioRow row;
    row.alphaDt = a;
    row.ratioAll = in > 0 ? outAll / in : 0;
    row.ratioFirst = in > 0 ? out1 / in : 0;
    row.weightsDecayed = peakAll == 0 || lastAll <= 1e-6L * peakAll;
    table.push_back(row);
  }
  return table;
}

// Empirical front speed of a growing solution: per snapshot, the furthest j
// whose amplitude exceeds threshold times the peak seen so far; the
// least-squares slope of that front against n, converted to a velocity.
// The cut is a running quantity so that whatever happens after the wave
// reaches the right edge (where the fit stops anyway) cannot raise the bar
// retroactively on the clean early snapshots.
inline long double wavefront_speed(const Trajectory& traj, int component,
                                   long double threshold) {
  long double peak = 0;
  std::vector<std::pair<long, long>> front;  // (n, furthest j)
  bool saturated = false;
  for (int n = 0; n <= traj.steps(); ++n) {
    for (int j = 0; j < traj.points; ++j)
      peak = std::max(peak, std::abs(static_cast<long double>(traj.at(n, j, component))));
    if (peak == 0) continue;
    long double cut = threshold * peak;
    int far = -1;
    for (int j = traj.points - 1; j >= 0; --j)
      if (std::abs(static_cast<long double>(traj.at(n, j, component))) > cut) {
        far = j;
        break;
      }
    if (far >= traj.points - 2) {
      saturated = true;  // wave filled the grid: fit the rising part only
      break;
    }
    if (far >= 0) front.push_back({n, far});
  }
  if (peak == 0) throw SchemeError("no signal: the trajectory is identically zero");
  if (front.size() < 16)
    throw SchemeError("front did not develop: too few snapshots cross the threshold");
  if (!saturated && front.back().first < 3L * traj.steps() / 4)
    throw SchemeError("front faded before the end of the run");
  long double sn = 0, sj = 0, snn = 0, snj = 0, cnt = static_cast<long double>(front.size());
  for (auto [n, j] : front) {
    sn += static_cast<long double>(n);
    sj += static_cast<long double>(j);
    snn += static_cast<long double>(n) * static_cast<long double>(n);
    snj += static_cast<long double>(n) * static_cast<long double>(j);
  }
  long double den = cnt * snn - sn * sn;
  if (den == 0) throw SchemeError("front did not move");
  long double slope = (cnt * snj - sn * sj) / den;  // cells per step
  return slope * traj.dx / traj.dt;
}

}  // namespace lbstab
