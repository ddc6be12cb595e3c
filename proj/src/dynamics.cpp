#include "zbsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "zbsim/constants.hpp"

namespace zbsim::dynamics {

namespace {

constexpr cxd kJ{0.0, 1.0};

// (exp(i*theta) - 1) evaluated as 2i sin(theta/2) exp(i theta/2): exact and
// cancellation-free for small theta.
cxd expm1_unit(double theta) {
  return 2.0 * kJ * std::sin(0.5 * theta) *
         std::exp(kJ * cxd(0.5 * theta, 0.0));
}

void check_velocity_ops(const Mat& h, const std::vector<Mat>& vops) {
  if (vops.empty() || vops.size() > 3)
    throw DynamicsError("need 1 to 3 velocity operators");
  for (const auto& v : vops)
    if (v.rows() != h.rows() || v.cols() != h.cols())
      throw DynamicsError("velocity operator dimension mismatch");
}

} // namespace

Trajectory zb_closed_form(const Mat& h, const Vec& psi0,
                          const std::vector<Mat>& vops,
                          const std::vector<double>& t_us) {
  check_velocity_ops(h, vops);
  const EigenSystem es = eigh(h);
  const int n = static_cast<int>(es.values.size());
  const double emax = std::max(std::abs(es.values(0)),
                               std::abs(es.values(n - 1)));
  double emin = emax;
  for (int i = 0; i < n; ++i) emin = std::min(emin, std::abs(es.values(i)));
  if (emax == 0.0 || emin < 1e-12 * emax)
    throw DynamicsError(
        "closed form needs a non-singular Hamiltonian (zero level present); "
        "use the velocity-integration oracle");

  const Vec psi = es.vectors.adjoint() * psi0;
  const double deg_tol = 1e-12 * emax;

  Trajectory out;
  out.axes = static_cast<int>(vops.size());
  out.t_us = t_us;
  out.r.assign(t_us.size(), {0.0, 0.0, 0.0});

  for (int a = 0; a < out.axes; ++a) {
    const Mat v = es.vectors.adjoint() * vops[a] * es.vectors;
    // Secular drift: energy-diagonal (including degenerate-pair) part.
    // Oscillating part: off-diagonal beats integrated exactly.
    double drift = 0.0;
    std::vector<std::tuple<double, cxd>> beats; // (freq gap, matrix element)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const cxd w = std::conj(psi(j)) * v(j, k) * psi(k);
        if (w == cxd{}) continue;
        const double gap = es.values(j) - es.values(k);
        if (std::abs(gap) <= deg_tol) {
          drift += w.real(); // j=k (or exactly degenerate): w + conj pairs
        } else {
          beats.emplace_back(gap, w);
        }
      }
    for (size_t it = 0; it < t_us.size(); ++it) {
      const double t = t_us[it];
      cxd x = drift * t;
      for (const auto& [gap, w] : beats) {
        // integral of exp(2 pi i gap t') dt' from 0 to t
        x += w * expm1_unit(2.0 * kPi * gap * t) / (2.0 * kPi * kJ * gap);
      }
      out.max_imag = std::max(out.max_imag, std::abs(x.imag()));
      out.r[it][a] = x.real();
    }
  }
  return out;
}

Trajectory zb_oracle(const Mat& h, const Vec& psi0,
                     const std::vector<Mat>& vops, double t_max_us, int nt,
                     int steps_per_period) {
  check_velocity_ops(h, vops);
  if (nt < 1 || t_max_us <= 0.0)
    throw DynamicsError("oracle needs nt >= 1 and t_max > 0");
  steps_per_period = std::max(steps_per_period, 4);

  const EigenSystem es = eigh(h);
  const int n = static_cast<int>(es.values.size());
  const double f_max = es.values(n - 1) - es.values(0); // fastest beat (MHz)
  const Vec psi = es.vectors.adjoint() * psi0;
  std::vector<Mat> vtil(vops.size());
  for (size_t a = 0; a < vops.size(); ++a)
    vtil[a] = es.vectors.adjoint() * vops[a] * es.vectors;

  const double seg = t_max_us / nt;
  int m = 2; // fine Simpson intervals per output segment (even)
  if (f_max > 0.0) {
    const double dt_target = 1.0 / (steps_per_period * f_max);
    m = std::max(2, 2 * static_cast<int>(std::ceil(seg / dt_target / 2.0)));
  }

  const int axes = static_cast<int>(vops.size());
  auto velocity = [&](double t, int a, double* norm_dev) {
    Vec p(n);
    for (int j = 0; j < n; ++j)
      p(j) = psi(j) * std::exp(-2.0 * kPi * kJ * cxd(es.values(j) * t, 0.0));
    if (norm_dev) *norm_dev = std::abs(p.norm() - psi.norm());
    return (p.adjoint() * vtil[a] * p)(0, 0).real();
  };

  auto integrate = [&](int mm, Trajectory& out) {
    const double dt = seg / mm;
    std::vector<double> x(axes, 0.0);
    out.t_us.assign(nt + 1, 0.0);
    out.r.assign(nt + 1, {0.0, 0.0, 0.0});
    for (int s = 0; s < nt; ++s) {
      const double t0 = s * seg;
      for (int a = 0; a < axes; ++a) {
        double acc = 0.0;
        for (int i = 0; i <= mm; ++i) {
          double ndev = 0.0;
          const double v =
              velocity(t0 + i * dt, a, (a == 0 && i == mm) ? &ndev : nullptr);
          out.norm_drift = std::max(out.norm_drift, ndev);
          const double w = (i == 0 || i == mm) ? 1.0 : (i % 2 ? 4.0 : 2.0);
          acc += w * v;
        }
        x[a] += acc * dt / 3.0;
        out.r[s + 1][a] = x[a];
      }
      out.t_us[s + 1] = (s + 1) * seg;
    }
  };

  Trajectory out;
  out.axes = axes;
  integrate(m, out);
  Trajectory half;
  half.axes = axes;
  integrate(2 * m, half);
  double dev = 0.0;
  for (int a = 0; a < axes; ++a) {
    const double scale = std::max(1.0, std::abs(half.r[nt][a]));
    dev = std::max(dev, std::abs(out.r[nt][a] - half.r[nt][a]) / scale);
  }
  out.richardson = dev;
  out.step_warning = dev > 1e-8;
  return out;
}

double erfinv(double y) {
  if (!(y > -1.0 && y < 1.0))
    throw DynamicsError("erfinv argument out of (-1, 1)");
  if (y == 0.0) return 0.0;
  // Winitzki initial estimate, then Newton on erf(x) - y.
  const double a = 0.147;
  const double ln1my2 = std::log(1.0 - y * y);
  const double t1 = 2.0 / (kPi * a) + 0.5 * ln1my2;
  double x = std::copysign(
      std::sqrt(std::sqrt(t1 * t1 - ln1my2 / a) - t1), y);
  for (int it = 0; it < 60; ++it) {
    const double err = std::erf(x) - y;
    const double step = err * 0.5 * std::sqrt(kPi) * std::exp(x * x);
    x -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

std::vector<double> wavepacket_momenta(const WavepacketSpec& spec,
                                       double mean, double width) {
  if (spec.kind == "point" || width == 0.0) return {mean};
  if (spec.kind != "gaussian")
    throw DynamicsError("unknown wavepacket kind: " + spec.kind);
  if (spec.samples < 1) throw DynamicsError("wavepacket needs samples >= 1");
  std::vector<double> p(spec.samples);
  const int n = spec.samples;
  for (int j = 1; j <= n; ++j)
    p[j - 1] = mean + width * std::sqrt(2.0) *
                          erfinv((2.0 * j - 1.0) / n - 1.0);
  return p;
}

namespace {

Trajectory average_stored(const std::vector<Trajectory>& parts) {
  Trajectory out = parts.front();
  const double wsum = static_cast<double>(parts.size());
  for (size_t j = 1; j < parts.size(); ++j) {
    const Trajectory& tr = parts[j];
    if (tr.r.size() != out.r.size())
      throw DynamicsError("wavepacket members disagree on the time grid");
    for (size_t i = 0; i < out.r.size(); ++i)
      for (int a = 0; a < 3; ++a) out.r[i][a] += tr.r[i][a];
    out.max_imag = std::max(out.max_imag, tr.max_imag);
    out.richardson = std::max(out.richardson, tr.richardson);
    out.step_warning = out.step_warning || tr.step_warning;
    out.norm_drift = std::max(out.norm_drift, tr.norm_drift);
  }
  for (size_t i = 0; i < out.r.size(); ++i)
    for (int a = 0; a < 3; ++a) out.r[i][a] /= wsum;
  return out;
}

} // namespace

Trajectory wavepacket_average_serial(
    const std::vector<double>& momenta,
    const std::function<Trajectory(double)>& make) {
  if (momenta.empty()) throw DynamicsError("empty momentum list");
  std::vector<Trajectory> parts(momenta.size());
  for (size_t j = 0; j < momenta.size(); ++j) parts[j] = make(momenta[j]);
  return average_stored(parts);
}

Trajectory wavepacket_average(const std::vector<double>& momenta,
                              const std::function<Trajectory(double)>& make) {
  if (momenta.empty()) throw DynamicsError("empty momentum list");
  std::vector<Trajectory> parts(momenta.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long j = 0; j < static_cast<long>(momenta.size()); ++j)
    parts[j] = make(momenta[j]);
  // Reduction always runs serially in momentum order: bit-identical to the
  // serial path for any thread count.
  return average_stored(parts);
}

TremorAnalysis analyze_tremor(const Trajectory& tr, int axis) {
  const size_t n = tr.t_us.size();
  if (n < 8 || tr.r.size() != n)
    throw DynamicsError("trajectory too short to analyze");
  if (axis < 0 || axis >= 3) throw DynamicsError("axis out of range");

  // Least-squares line x = a + b t.
  double st = 0, st2 = 0, sx = 0, sxt = 0;
  for (size_t i = 0; i < n; ++i) {
    st += tr.t_us[i];
    st2 += tr.t_us[i] * tr.t_us[i];
    sx += tr.r[i][axis];
    sxt += tr.r[i][axis] * tr.t_us[i];
  }
  const double den = n * st2 - st * st;
  if (den == 0.0) throw DynamicsError("degenerate time grid");
  const double b = (n * sxt - st * sx) / den;
  const double a = (sx - b * st) / n;

  std::vector<double> resid(n);
  double amp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    resid[i] = tr.r[i][axis] - (a + b * tr.t_us[i]);
    amp = std::max(amp, std::abs(resid[i]));
  }

  int crossings = 0;
  double first = 0.0, last = 0.0;
  for (size_t i = 1; i < n; ++i) {
    if (resid[i - 1] == 0.0) continue;
    if ((resid[i - 1] > 0) != (resid[i] >= 0)) {
      const double frac = resid[i - 1] / (resid[i - 1] - resid[i]);
      const double tc =
          tr.t_us[i - 1] + frac * (tr.t_us[i] - tr.t_us[i - 1]);
      if (crossings == 0) first = tc;
      last = tc;
      ++crossings;
    }
  }
  if (crossings < 10)
    throw DynamicsError(
        "trace covers fewer than five beat periods; extend the time grid");

  // Two crossings per period.
  double f0 = 0.5 * (crossings - 1) / (last - first);

  // Refine: maximize the single-tone projection |sum resid * exp(2pi i f t)|.
  // The projection oscillates on the window-sidelobe scale 1/T, so a blind
  // bracket search is unreliable; the crossing estimate is good to half a
  // lobe, so scan its neighbourhood at sub-lobe resolution and only then
  // polish the winning lobe (unimodal) by golden section.
  auto power = [&](double f) {
    cxd s{};
    for (size_t i = 0; i < n; ++i)
      s += resid[i] * std::exp(kJ * cxd(2.0 * kPi * f * tr.t_us[i], 0.0));
    return std::abs(s);
  };
  const double span = tr.t_us.back() - tr.t_us.front();
  const double lobe = 1.0 / span;
  const int nscan = 120;
  double lo = std::max(0.25 * f0, f0 - 2.0 * lobe);
  double hi = f0 + 2.0 * lobe;
  double fbest = f0, pbest = -1.0;
  for (int i = 0; i <= nscan; ++i) {
    const double f = lo + (hi - lo) * i / nscan;
    const double p = power(f);
    if (p > pbest) { pbest = p; fbest = f; }
  }
  const double step = (hi - lo) / nscan;
  lo = std::max(0.5 * step, fbest - step);
  hi = fbest + step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double pc = power(c), pd = power(d);
  for (int it = 0; it < 80; ++it) {
    if (pc > pd) {
      hi = d; d = c; pd = pc;
      c = hi - gr * (hi - lo); pc = power(c);
    } else {
      lo = c; c = d; pc = pd;
      d = lo + gr * (hi - lo); pd = power(d);
    }
  }

  TremorAnalysis out;
  out.drift_velocity = b;
  out.frequency_mhz = 0.5 * (lo + hi);
  out.amplitude = amp;
  out.crossings = crossings;
  return out;
}

} // namespace zbsim::dynamics
