#include "loopgrating/atom/susceptibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "loopgrating/error.hpp"

namespace loopgrating::atom {

namespace {

constexpr cd I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

// Reference medium against which chi_scale is defined.
const MediumParams kReferenceMedium{};

void check_weak_probe(const AtomFieldParams& p, const PerturbativeOptions& opt) {
  if (!opt.allow_strong_probe && p.omega_p > 0.01 * p.omega_c) {
    throw Error(ErrorCode::OutOfRange, "omega_p = " + std::to_string(p.omega_p) +
                                           " exceeds the weak-probe bound 0.01·omega_c = " +
                                           std::to_string(0.01 * p.omega_c));
  }
}

struct RelaxationRates {
  cd eg, mg, bg;
};

RelaxationRates relaxation_rates(const AtomFieldParams& p) {
  RelaxationRates r{p.gamma.eg - I * p.delta_p, p.gamma.gm - I * (p.delta_p - p.Delta_c),
                    p.gamma.gb - I * (p.delta_p - p.Delta_c + p.delta_d)};
  for (cd v : {r.eg, r.mg, r.bg}) {
    if (std::abs(v) < 1e-12) throw Error(ErrorCode::ResonanceSingularity, "vanishing relaxation rate");
  }
  return r;
}

AtomFieldParams probe_free(const AtomFieldParams& p) {
  AtomFieldParams q = p;
  q.omega_p = 0.0;
  return q;
}

}  // namespace

PerturbativeCoherence coherence_perturbative(const AtomFieldParams& params, const PerturbativeOptions& opt) {
  params.validate();
  check_weak_probe(params, opt);
  relaxation_rates(params);

  const LinearGenerator g0 = build_generator(probe_free(params));
  AtomFieldParams unit = params;
  unit.omega_p = 1.0;
  const Mat16 L1 = build_generator(unit).G - g0.G;

  const SteadyState s0 = steady_state_exact(g0);
  const Vec16 r0 = vectorize(s0.rho);

  Mat16 A = g0.G;
  Vec16 b = -L1 * r0;
  A.row(0).setZero();
  for (int k = 0; k < 4; ++k) A(0, vec_index(k, k)) = 1.0;
  b(0) = 0.0;
  Eigen::PartialPivLU<Mat16> lu(A);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::DegenerateSteadyState, "probe-free generator has a degenerate kernel");
  }
  const Vec16 r1 = lu.solve(b);
  return {s0.rho(E, G), r1(vec_index(E, G))};
}

PerturbativeCoherence closed_form_coherence(const AtomFieldParams& params, const PerturbativeOptions& opt) {
  params.validate();
  check_weak_probe(params, opt);
  const RelaxationRates R = relaxation_rates(params);
  const DensityMatrix rho0 = steady_state_exact(probe_free(params)).rho;
  const double gg = rho0(G, G).real();
  const double mm = rho0(M, M).real();
  const double oc = params.omega_c, od = params.omega_d, om = params.omega_m;

  const cd dressed = R.eg + oc * oc / (R.mg + od * od / R.bg);
  const cd zeroth = om * oc / dressed * R.bg * (mm - gg) / (R.mg * R.eg * R.bg + R.bg * oc * oc + R.eg * od * od);
  const cd first = std::exp(-I * params.loop_phase()) / dressed * ((R.eg + R.mg) * oc / (R.mg * R.eg) * mm - I * gg);
  return {zeroth, first};
}

cd coherence_per_probe(const AtomFieldParams& params, SolverMode mode) {
  if (!(params.omega_p > 0.0)) throw Error(ErrorCode::OutOfRange, "susceptibility requires omega_p > 0");
  if (mode == SolverMode::Exact) return steady_state_exact(params).rho(E, G) / params.omega_p;
  const auto pc = coherence_perturbative(params);
  return pc.rho_eg_0 / params.omega_p + pc.rho_eg_1;
}

double reference_peak_coherence() {
  static const double peak = [] {
    AtomFieldParams p = AtomFieldParams{}.with_loop_phase(pi / 2.0);
    constexpr int n = 4096;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = -0.5 + static_cast<double>(i) / n;
      p.Delta_c = 4.0 * std::sin(pi * x);
      best = std::max(best, coherence_per_probe(p, SolverMode::Exact).imag());
    }
    return best;
  }();
  return peak;
}

cd chi_from_coherence(cd c, const MediumParams& medium) {
  const double kappa = medium.chi_scale / (kReferenceMedium.k_p() * kReferenceMedium.length_L * reference_peak_coherence()) *
                       (medium.density_N / kReferenceMedium.density_N);
  return kappa * c;
}

cd susceptibility(const AtomFieldParams& params, const MediumParams& medium, SolverMode mode) {
  medium.validate();
  return chi_from_coherence(coherence_per_probe(params, mode), medium);
}

AppendixCoefficients appendix_coefficients(const AtomFieldParams& params) {
  params.validate();
  const auto& g = params.gamma;
  const double tol = 1e-12 * std::max({g.eg, g.em, g.mb});
  if (std::abs(g.eg - g.em) > tol || std::abs(g.eg - g.mb) > tol) {
    throw Error(ErrorCode::AssumptionViolated, "requires a common dephasing gamma_eg = gamma_em = gamma_mb");
  }
  if (std::abs(params.delta_p - params.Delta_c) > 1e-12 * std::max(1.0, std::abs(params.delta_p))) {
    throw Error(ErrorCode::AssumptionViolated, "requires two-photon resonance delta_p = Delta_c");
  }
  const DensityMatrix rho0 = steady_state_exact(probe_free(params)).rho;
  const double gg = rho0(G, G).real();
  const double mm = rho0(M, M).real();
  const double gam = g.eg, gm = g.gm, d = params.delta_p;
  const double oc = params.omega_c, od = params.omega_d, om = params.omega_m, op = params.omega_p;
  const double lor = gam * gam + d * d;
  const double lor2 = lor * lor;
  const double pref0 = gam * (mm - gg) * om * oc / (od * od);

  AppendixCoefficients c{};
  c.A0 = pref0 * lor / lor2;
  c.B0 = pref0 * 2.0 * d / lor2;
  c.A1 = oc * mm * (gam + gm) * lor / (gm * lor2) - op * gg * gm * (gam * gam * d + d * d * d) / (gm * lor2);
  c.B1 = oc * mm * gam * gam * d / (gm * lor2) + op * gg * gm * gam * lor / (gm * lor2);
  return c;
}

std::string_view to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::PT: return "PT";
    case SymmetryClass::NormalAPT: return "NormalAPT";
    case SymmetryClass::AbnormalAPT: return "AbnormalAPT";
    case SymmetryClass::NoSymmetry: return "NoSymmetry";
  }
  return "NoSymmetry";
}

SymmetryClass classify_symmetry(double Phi, double tol) {
  if (!(tol > 0.0 && tol < pi / 8.0)) throw Error(ErrorCode::InvalidArgument, "tol must lie in (0, pi/8)");
  const double w = wrap_phase(Phi);
  auto distance = [&](double centre, double period) {
    const double d = w - centre;
    return std::abs(d - period * std::round(d / period));
  };
  if (distance(0.0, pi) <= tol) return SymmetryClass::PT;
  if (distance(pi / 2.0, 2.0 * pi) <= tol) return SymmetryClass::NormalAPT;
  if (distance(3.0 * pi / 2.0, 2.0 * pi) <= tol) return SymmetryClass::AbnormalAPT;
  return SymmetryClass::NoSymmetry;
}

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::None: return "none";
  }
  return "none";
}

FoldResiduals fold(const std::vector<double>& f, double threshold) {
  FoldResiduals r;
  const std::size_t n = f.size();
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  if (scale > 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      r.r_even = std::max(r.r_even, std::abs(f[k] - f[n - 1 - k]));
      r.r_odd = std::max(r.r_odd, std::abs(f[k] + f[n - 1 - k]));
    }
    r.r_even /= scale;
    r.r_odd /= scale;
  }
  if (r.r_even < threshold)
    r.parity = Parity::Even;
  else if (r.r_odd < threshold)
    r.parity = Parity::Odd;
  return r;
}

std::vector<double> symmetric_grid(double span, int count) {
  if (count < 2 || !(span > 0.0)) throw Error(ErrorCode::InvalidArgument, "symmetric grid needs count >= 2, span > 0");
  std::vector<double> g(count);
  for (int k = 0; k < count; ++k) {
    g[k] = -span + 2.0 * span * k / (count - 1);
  }
  // Exact mirror symmetry, independent of rounding in the formula above.
  for (int k = 0; k < count / 2; ++k) g[count - 1 - k] = -g[k];
  if (count % 2 == 1) g[count / 2] = 0.0;
  return g;
}

ParityReport parity_report(const AtomFieldParams& params, const std::vector<double>& delta_grid, double Phi,
                           double threshold, const MediumParams& medium) {
  const std::size_t n = delta_grid.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "delta grid needs at least two points");
  double span = 0.0;
  for (double d : delta_grid) span = std::max(span, std::abs(d));
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(delta_grid[k] + delta_grid[n - 1 - k]) > 1e-12 * span) {
      throw Error(ErrorCode::InvalidArgument, "delta grid is not symmetric about 0");
    }
  }
  ParityReport rep;
  rep.Phi = wrap_phase(Phi);
  rep.delta = delta_grid;
  rep.chi.resize(n);
  std::vector<double> re(n), im(n);
  AtomFieldParams p = params.with_loop_phase(Phi);
  for (std::size_t k = 0; k < n; ++k) {
    p.delta_p = delta_grid[k];
    rep.chi[k] = susceptibility(p, medium);
    re[k] = rep.chi[k].real();
    im[k] = rep.chi[k].imag();
  }
  rep.re = fold(re, threshold);
  rep.im = fold(im, threshold);
  return rep;
}

ParityReport verify_parity_frequency(const AtomFieldParams& params, const std::vector<double>& delta_grid,
                                     double Phi, double threshold, const MediumParams& medium) {
  ParityReport rep = parity_report(params, delta_grid, Phi, threshold, medium);
  if (!rep.conclusive()) {
    throw Error(ErrorCode::InconclusiveParity,
                "Phi = " + std::to_string(rep.Phi) + ": Re residuals (even " + std::to_string(rep.re.r_even) +
                    ", odd " + std::to_string(rep.re.r_odd) + "), Im residuals (even " +
                    std::to_string(rep.im.r_even) + ", odd " + std::to_string(rep.im.r_odd) + ")");
  }
  return rep;
}

}  // namespace loopgrating::atom
