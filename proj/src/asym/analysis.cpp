#include "loopgrating/asym/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "loopgrating/error.hpp"
#include "loopgrating/grating/quadrature.hpp"
#include "loopgrating/table.hpp"

namespace loopgrating::asym {

namespace {

constexpr double pi = std::numbers::pi;

void check_sizes(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  if (alpha.size() != beta.size()) throw Error(ErrorCode::InvalidArgument, "alpha/beta size mismatch");
  if (alpha.size() < 11) throw Error(ErrorCode::GridTooCoarse, "profile needs at least 11 samples");
}

// Integrals over x ∈ [0, 1/2] on the upper half of the closed cell grid.
struct HalfCell {
  Eigen::Index start;
  Eigen::VectorXd w;
  Eigen::VectorXd x;

  explicit HalfCell(Eigen::Index samples) {
    const auto n = samples - 1;
    if (n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "half-period integrals need an even interval count");
    start = n / 2;
    w = grating::gregory_weights(static_cast<int>(n / 2), 0.5);
    x = grating::cell_grid(static_cast<int>(n)).tail(n / 2 + 1);
  }

  template <class F>
  double integrate(F f) const {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) sum += w(k) * f(start + k, x(k));
    return sum;
  }
};

double relative_norm(const Eigen::VectorXd& approx, const Eigen::VectorXd& ref) {
  const double denom = ref.norm();
  return denom > 0.0 ? (approx - ref).norm() / denom : (approx - ref).norm();
}

}  // namespace

ScatteringCoefficients scattering_coefficients(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, int n,
                                               double epsilon) {
  check_sizes(alpha, beta);
  const int intervals = static_cast<int>(alpha.size()) - 1;
  const Eigen::VectorXd x = grating::cell_grid(intervals);
  const Eigen::VectorXd w = grating::gregory_weights(intervals);
  ScatteringCoefficients c;
  c.n = n;
  c.epsilon = epsilon;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = alpha(i), b = beta(i);
    const double weight = w(i) * (1.0 + a + 0.5 * a * a);
    const double g = 2.0 * n * pi * x(i);
    const double s = std::sin(g), co = std::cos(g);
    const double quad = 0.5 * (b * b - 2.0);
    c.f_prime += weight * b * s;
    c.f_dprime += weight * b * co;
    c.g_prime += weight * quad * co;
    c.g_dprime += weight * quad * s;
  }
  c.outside_weak_regime = std::max(alpha.cwiseAbs().maxCoeff(), beta.cwiseAbs().maxCoeff()) > 0.3;
  return c;
}

ScatteringCoefficients scattering_coefficients(const grating::SusceptibilityProfile& profile, int n, double epsilon) {
  return scattering_coefficients(profile.alpha, profile.beta, n, epsilon);
}

cd expansion_amplitude(const ScatteringCoefficients& c) {
  const double e = c.epsilon;
  return {c.f_prime * e - c.g_prime * e * e / 2.0, c.f_dprime * e + c.g_dprime * e * e / 2.0};
}

EtaValue eta_expansion(const ScatteringCoefficients& c) {
  const double denom = c.f_prime * c.f_prime + c.f_dprime * c.f_dprime;
  if (!(denom >= 1e-30)) {
    throw Error(ErrorCode::DegenerateOrder, "order " + std::to_string(c.n) + " has no first-order scattering");
  }
  EtaValue v;
  v.raw = std::abs(c.f_prime * c.g_prime - c.f_dprime * c.g_dprime) / denom * c.epsilon;
  v.clamped = v.raw > 1.0;
  v.eta = std::min(v.raw, 1.0);
  return v;
}

double eta_exact(const std::vector<grating::DiffractionOrder>& orders, int n) {
  const grating::DiffractionOrder* plus = nullptr;
  const grating::DiffractionOrder* minus = nullptr;
  for (const auto& o : orders) {
    if (o.n == n) plus = &o;
    if (o.n == -n) minus = &o;
  }
  if (!plus || !minus) throw Error(ErrorCode::InvalidArgument, "orders ±" + std::to_string(n) + " not in the table");
  const double sum = plus->intensity + minus->intensity;
  if (!(sum >= 1e-15)) throw Error(ErrorCode::BothOrdersDark, "orders ±" + std::to_string(n) + " carry no intensity");
  return std::abs(plus->intensity - minus->intensity) / sum;
}

double eta_exact(const grating::DiffractionSpectrum& spectrum, int n) { return eta_exact(spectrum.orders, n); }

SymmetryProducts symmetry_products(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, int n,
                                   SymmetryClass cls, double epsilon) {
  check_sizes(alpha, beta);
  if (cls != SymmetryClass::PT && cls != SymmetryClass::NormalAPT) {
    throw Error(ErrorCode::WrongSymmetryClass,
                "half-period products need PT or NormalAPT, got " + std::string(atom::to_string(cls)));
  }
  const HalfCell h(alpha.size());
  const double k = 2.0 * n * pi;
  auto sn = [&](double x) { return std::sin(k * x); };
  auto cs = [&](double x) { return std::cos(k * x); };
  const auto& a = alpha;
  const auto& b = beta;

  double fp, gp, fpp, gpp;
  if (cls == SymmetryClass::PT) {
    fp = h.integrate([&](auto i, double x) { return 2.0 * a(i) * b(i) * sn(x); });
    gp = h.integrate([&](auto i, double x) { return (1.0 + 0.5 * a(i) * a(i)) * (b(i) * b(i) - 2.0) * cs(x); });
    fpp = h.integrate([&](auto i, double x) { return 2.0 * (1.0 + 0.5 * a(i) * a(i)) * b(i) * cs(x); });
    gpp = h.integrate([&](auto i, double x) { return a(i) * (b(i) * b(i) - 2.0) * sn(x); });
  } else {
    fp = h.integrate([&](auto i, double x) { return (2.0 + 2.0 * a(i) + a(i) * a(i)) * b(i) * sn(x); });
    gp = h.integrate(
        [&](auto i, double x) { return (1.0 + a(i) + 0.5 * a(i) * a(i)) * (b(i) * b(i) - 2.0) * cs(x); });
    fpp = 0.0;
    gpp = 0.0;
  }
  SymmetryProducts out;
  out.fg_prime_product = fp * gp;
  out.fg_dprime_product = fpp * gpp;
  out.f_prime = fp;
  out.f_dprime = fpp;
  const double denom = fp * fp + fpp * fpp;
  if (!(denom >= 1e-30)) {
    throw Error(ErrorCode::DegenerateOrder, "order " + std::to_string(n) + " has no first-order scattering");
  }
  out.eta_from_products = std::abs(out.fg_prime_product - out.fg_dprime_product) / denom * epsilon;
  return out;
}

Eigen::VectorXd hilbert_periodic(const Eigen::VectorXd& f) {
  const auto n = f.size();
  Eigen::FFT<double> fft;
  std::vector<double> in(f.data(), f.data() + n);
  std::vector<cd> spec;
  fft.fwd(spec, in);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == 0 || 2 * k == n) {
      spec[k] = 0.0;
    } else if (2 * k < n) {
      spec[k] *= cd(0.0, -1.0);
    } else {
      spec[k] *= cd(0.0, 1.0);
    }
  }
  std::vector<cd> back;
  fft.inv(back, spec);
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = back[k].real();
  return out;
}

KKResidual kk_residual(const grating::SusceptibilityProfile& profile) {
  const Eigen::Index n = profile.chi.size() - 1;  // periodic samples
  Eigen::VectorXd re = profile.chi.head(n).real();
  Eigen::VectorXd im = profile.chi.head(n).imag();
  re.array() -= re.mean();
  im.array() -= im.mean();
  const Eigen::VectorXd h_im = hilbert_periodic(im);
  const Eigen::VectorXd h_re = hilbert_periodic(re);

  const double a_re = relative_norm(-h_im, re), a_im = relative_norm(h_re, im);
  const double b_re = relative_norm(h_im, re), b_im = relative_norm(-h_re, im);
  KKResidual r;
  r.analytic_orientation = std::max(a_re, a_im) <= std::max(b_re, b_im);
  r.r_re_from_im = r.analytic_orientation ? a_re : b_re;
  r.r_im_from_re = r.analytic_orientation ? a_im : b_im;
  r.r_re_from_im_other = r.analytic_orientation ? b_re : a_re;
  r.r_im_from_re_other = r.analytic_orientation ? b_im : a_im;
  return r;
}

AptChainCheck apt_lopsided_check(const grating::SusceptibilityProfile& profile, int n) {
  if (profile.symmetry != SymmetryClass::NormalAPT) {
    throw Error(ErrorCode::WrongSymmetryClass,
                "pure-loss chain needs a NormalAPT profile, got " + std::string(atom::to_string(profile.symmetry)));
  }
  AptChainCheck out;
  out.n = n;
  const ScatteringCoefficients c = scattering_coefficients(profile, n);
  if (!(std::abs(c.f_prime) > 0.0)) throw Error(ErrorCode::DegenerateOrder, "f' vanishes");
  out.ratio_a = std::abs(c.g_prime / c.f_prime);

  const HalfCell h(profile.alpha.size());
  const double k = 2.0 * n * pi;
  const auto& a = profile.alpha;
  const auto& b = profile.beta;
  const double den = h.integrate([&](auto i, double x) { return (1.0 + a(i)) * std::cos(k * x); });
  const double num_b = h.integrate([&](auto i, double x) { return b(i) * std::sin(k * x); });
  out.ratio_b = std::abs(num_b / den);

  // β ≈ c·H[α − ᾱ] + β̄ on the periodic samples, closed periodically.
  const Eigen::Index np = a.size() - 1;
  Eigen::VectorXd a0 = a.head(np);
  a0.array() -= a0.mean();
  const Eigen::VectorXd ha = hilbert_periodic(a0);
  const double b_mean = b.head(np).mean();
  const Eigen::VectorXd b0 = b.head(np).array() - b_mean;
  const double hh = ha.squaredNorm();
  out.kk_scale = hh > 0.0 ? ha.dot(b0) / hh : 0.0;
  Eigen::VectorXd b_kk(a.size());
  b_kk.head(np) = out.kk_scale * ha.array() + b_mean;
  b_kk(np) = b_kk(0);
  const double num_c = h.integrate([&](auto i, double x) { return b_kk(i) * std::sin(k * x); });
  out.ratio_c = std::abs(num_c / den);

  out.residual_a = std::abs(out.ratio_a - 1.0);
  out.residual_b = std::abs(out.ratio_b - 1.0);
  out.residual_c = std::abs(out.ratio_c - 1.0);
  out.kk = kk_residual(profile);
  return out;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::OmegaC: return "omega_c";
    case SweepAxis::OmegaD: return "omega_d";
    case SweepAxis::OmegaM: return "omega_m";
  }
  return "omega_c";
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "omega_c") return SweepAxis::OmegaC;
  if (name == "omega_d") return SweepAxis::OmegaD;
  if (name == "omega_m") return SweepAxis::OmegaM;
  throw Error(ErrorCode::OutOfRange, "sweep axis must be omega_c, omega_d or omega_m, got '" + std::string(name) + "'");
}

std::vector<SweepRow> robustness_sweep(const atom::AtomFieldParams& base, const atom::MediumParams& medium,
                                       const grating::SpatialModulation& mod, const grating::GratingGeometry& geo,
                                       SweepAxis axis, const std::vector<double>& values,
                                       const std::vector<double>& Phi_list, Parallel par) {
  geo.validate();
  if (geo.max_order() < 3) throw Error(ErrorCode::OutOfRange, "robustness sweep needs R >= 3 for orders 1..3");
  for (double v : values) {
    if (!(std::isfinite(v) && v >= 0.0)) throw Error(ErrorCode::OutOfRange, "sweep values must be >= 0");
  }
  std::vector<SweepRow> rows(values.size() * Phi_list.size());
  parallel_for(rows.size(), par, [&](std::size_t idx) {
    const double Phi = Phi_list[idx / values.size()];
    const double value = values[idx % values.size()];
    SweepRow& row = rows[idx];
    row.value = value;
    row.Phi = atom::wrap_phase(Phi);
    row.phase_class = atom::classify_symmetry(Phi);
    atom::AtomFieldParams p = base.with_loop_phase(Phi);
    switch (axis) {
      case SweepAxis::OmegaC: p.omega_c = value; break;
      case SweepAxis::OmegaD: p.omega_d = value; break;
      case SweepAxis::OmegaM: p.omega_m = value; break;
    }
    try {
      const auto profile = grating::susceptibility_profile(p, medium, mod, geo, atom::SolverMode::Exact, Parallel{1});
      row.parity = grating::spatial_parity(profile);
      const auto orders = grating::order_table(grating::transmission(profile), geo);
      for (int n = 1; n <= 3; ++n) {
        row.eta_exact[n - 1] = eta_exact(orders, n);
        const EtaValue e = eta_expansion(scattering_coefficients(profile, n));
        row.eta_expansion[n - 1] = e.eta;
        row.eta_expansion_clamped[n - 1] = e.clamped;
        for (const auto& o : orders) {
          if (o.n == n) row.I_plus[n - 1] = o.intensity;
          if (o.n == -n) row.I_minus[n - 1] = o.intensity;
        }
      }
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (sweep point " + std::string(to_string(axis)) + " = " +
                                std::to_string(value) + ", Phi = " + std::to_string(Phi) + ")");
    }
  });
  return rows;
}

void write_asymmetry_report(std::ostream& os, const std::vector<SweepRow>& rows) {
  TableWriter t(os, {"sweep_value", "class", "eta1_exact", "eta1_exp", "eta2_exact", "eta2_exp", "eta3_exact",
                     "eta3_exp", "I_m1", "I_p1", "I_m2", "I_p2", "I_m3", "I_p3"});
  for (const auto& r : rows) {
    std::vector<std::string> cells{format_value(r.value), std::string(atom::to_string(r.phase_class))};
    for (int k = 0; k < 3; ++k) {
      cells.push_back(format_value(r.eta_exact[k]));
      cells.push_back(format_value(r.eta_expansion[k]));
    }
    for (int k = 0; k < 3; ++k) {
      cells.push_back(format_value(r.I_minus[k]));
      cells.push_back(format_value(r.I_plus[k]));
    }
    t.row(cells);
  }
}

}  // namespace loopgrating::asym
