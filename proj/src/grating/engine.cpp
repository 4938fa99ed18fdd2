#include "loopgrating/grating/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "loopgrating/error.hpp"
#include "loopgrating/grating/quadrature.hpp"
#include "loopgrating/table.hpp"

namespace loopgrating::grating {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cd I{0.0, 1.0};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, what);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::VectorXd uniform_sin_grid(int count) {
  Eigen::VectorXd s(count);
  for (int j = 0; j < count; ++j) s(j) = -1.0 + 2.0 * j / (count - 1);
  for (int j = 0; j < count / 2; ++j) s(count - 1 - j) = -s(j);
  if (count % 2 == 1) s(count / 2) = 0.0;
  return s;
}

// Far-field quadrature kernel rows: K(a, i) = w_i·e^{−i2πR s_a x_i}.
Eigen::MatrixXcd kernel_matrix(const Eigen::VectorXd& s, const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                               double R) {
  Eigen::MatrixXcd K(s.size(), x.size());
  for (Eigen::Index a = 0; a < s.size(); ++a)
    for (Eigen::Index i = 0; i < x.size(); ++i) K(a, i) = w(i) * std::polar(1.0, -2.0 * pi * R * s(a) * x(i));
  return K;
}

cd amplitude(const Eigen::VectorXcd& T, const Eigen::VectorXd& x, const Eigen::VectorXd& w, double R, double s) {
  cd sum = 0.0;
  for (Eigen::Index i = 0; i < T.size(); ++i) sum += w(i) * T(i) * std::polar(1.0, -2.0 * pi * R * s * x(i));
  return sum;
}

int intervals_of(const Eigen::VectorXcd& T) {
  const auto n = static_cast<int>(T.size()) - 1;
  if (n < 10) throw Error(ErrorCode::GridTooCoarse, "transmission needs at least 11 samples");
  return n;
}

}  // namespace

void SpatialModulation::validate() const {
  require(std::isfinite(Delta_c0) && Delta_c0 >= 0.0, "Delta_c0 must be >= 0");
  require(std::isfinite(q) && q > 0.0, "q must be > 0");
  require(std::isfinite(x0) && std::abs(x0) <= 0.5, "|x0| must be <= 1/2");
  require(std::isfinite(probe_follow), "probe_follow must be finite");
}

void Modulation2D::validate() const {
  x.validate();
  require(std::isfinite(Delta_cy) && Delta_cy >= 0.0, "Delta_cy must be >= 0");
  require(std::isfinite(y0) && std::abs(y0) <= 0.5, "|y0| must be <= 1/2");
}

void GratingGeometry::validate() const {
  require(std::isfinite(R) && R >= 1.0, "R must be >= 1");
  require(M >= 1, "M must be >= 1");
  require(is_power_of_two(n_samples) && n_samples >= 256, "n_samples must be a power of two >= 256");
  require(n_theta >= 3, "n_theta must be >= 3");
}

int GratingGeometry::max_order() const { return static_cast<int>(std::floor(R + 1e-12)); }

Eigen::VectorXd cell_grid(int n) {
  Eigen::VectorXd x(n + 1);
  for (int i = 0; i <= n; ++i) x(i) = -0.5 + static_cast<double>(i) / n;
  return x;
}

Eigen::VectorXd detuning_profile(const SpatialModulation& mod, const GratingGeometry& geo) {
  mod.validate();
  geo.validate();
  const Eigen::VectorXd x = cell_grid(geo.n_samples);
  Eigen::VectorXd d(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) d(i) = mod.Delta_c0 * std::sin(2.0 * pi * mod.q * (x(i) - mod.x0));
  return d;
}

SusceptibilityProfile make_profile(const Eigen::VectorXcd& chi, const atom::MediumParams& medium, double Phi) {
  SusceptibilityProfile p;
  p.x = cell_grid(static_cast<int>(chi.size()) - 1);
  p.chi = chi;
  const double kl = medium.k_p() * medium.length_L;
  p.alpha = kl * chi.imag();
  p.beta = kl * chi.real();
  p.Phi = atom::wrap_phase(Phi);
  p.symmetry = atom::classify_symmetry(p.Phi);
  return p;
}

SusceptibilityProfile profile_from_alpha_beta(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double Phi) {
  if (alpha.size() != beta.size()) throw Error(ErrorCode::InvalidArgument, "alpha/beta size mismatch");
  SusceptibilityProfile p;
  p.x = cell_grid(static_cast<int>(alpha.size()) - 1);
  p.alpha = alpha;
  p.beta = beta;
  p.chi = beta.cast<cd>() + I * alpha.cast<cd>();
  p.Phi = atom::wrap_phase(Phi);
  p.symmetry = atom::classify_symmetry(p.Phi);
  return p;
}

SusceptibilityProfile susceptibility_profile(const atom::AtomFieldParams& params, const atom::MediumParams& medium,
                                             const SpatialModulation& mod, const GratingGeometry& geo,
                                             atom::SolverMode mode, Parallel par) {
  params.validate();
  medium.validate();
  const Eigen::VectorXd x = cell_grid(geo.n_samples);
  const Eigen::VectorXd dc = detuning_profile(mod, geo);
  Eigen::VectorXcd chi(x.size());
  parallel_for(static_cast<std::size_t>(x.size()), par, [&](std::size_t i) {
    atom::AtomFieldParams p = params;
    p.Delta_c = dc(i);
    p.delta_p = params.delta_p + mod.probe_follow * dc(i);
    try {
      chi(i) = atom::susceptibility(p, medium, mode);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (at x = " + std::to_string(x(i)) + ")");
    }
  });
  return make_profile(chi, medium, params.loop_phase());
}

SpatialParity spatial_parity(const SusceptibilityProfile& profile, double threshold) {
  const auto n = static_cast<std::size_t>(profile.chi.size());
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = profile.chi(i).real();
    im[i] = profile.chi(i).imag();
  }
  SpatialParity out{atom::fold(re, threshold), atom::fold(im, threshold)};
  using atom::Parity;
  using atom::SymmetryClass;
  if (out.re.parity == Parity::Even && out.im.parity == Parity::Odd) {
    out.inferred = SymmetryClass::PT;
  } else if (out.re.parity == Parity::Odd && out.im.parity == Parity::Even) {
    out.inferred = profile.alpha.mean() >= 0.0 ? SymmetryClass::NormalAPT : SymmetryClass::AbnormalAPT;
  }
  return out;
}

Eigen::VectorXcd transmission(const SusceptibilityProfile& profile) {
  Eigen::VectorXcd T(profile.alpha.size());
  for (Eigen::Index i = 0; i < T.size(); ++i) {
    if (-profile.alpha(i) > 20.0) {
      throw Error(ErrorCode::OverflowGuard, "gain exponent " + std::to_string(-profile.alpha(i)) +
                                                " exceeds 20 at x = " + std::to_string(profile.x(i)));
    }
    T(i) = std::exp(-profile.alpha(i)) * std::polar(1.0, profile.beta(i));
  }
  return T;
}

cd farfield_amplitude(const Eigen::VectorXcd& T, double sin_theta, const GratingGeometry& geo) {
  const int n = intervals_of(T);
  return amplitude(T, cell_grid(n), gregory_weights(n), geo.R, sin_theta);
}

double interference_factor(double sin_theta, double R, int M) {
  const double u = pi * R * sin_theta;
  const double up = u - pi * std::round(u / pi);  // sin²(Mu)/sin²(u) is π-periodic for integer M
  if (std::abs(up) < 1e-8) return 1.0 - (static_cast<double>(M) * M - 1.0) * up * up / 3.0;
  const double r = std::sin(M * up) / (M * std::sin(up));
  return r * r;
}

const DiffractionOrder& DiffractionSpectrum::order(int n) const {
  for (const auto& o : orders)
    if (o.n == n) return o;
  throw Error(ErrorCode::InvalidArgument, "order " + std::to_string(n) + " not in the table");
}

std::vector<DiffractionOrder> order_table(const Eigen::VectorXcd& T, const GratingGeometry& geo) {
  const int n = intervals_of(T);
  const Eigen::VectorXd x = cell_grid(n);
  const Eigen::VectorXd w = gregory_weights(n);
  const int nmax = geo.max_order();
  std::vector<DiffractionOrder> out;
  for (int k = -nmax; k <= nmax; ++k) {
    DiffractionOrder o;
    o.n = k;
    o.sin_theta = k / geo.R;
    // e^{−i2πR(k/R)x} = e^{−i2πkx}; use the integer form to avoid rounding in k/R·R.
    cd sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) sum += w(i) * T(i) * std::polar(1.0, -2.0 * pi * k * x(i));
    o.amplitude = sum;
    o.intensity = std::norm(sum);
    out.push_back(o);
  }
  return out;
}

DiffractionSpectrum intensity_spectrum(const Eigen::VectorXcd& T, const GratingGeometry& geo, Parallel par) {
  const int n = intervals_of(T);
  const Eigen::VectorXd x = cell_grid(n);
  const Eigen::VectorXd w = gregory_weights(n);
  DiffractionSpectrum spec;
  spec.sin_theta = uniform_sin_grid(geo.n_theta);
  spec.intensity.resize(geo.n_theta);
  parallel_for(static_cast<std::size_t>(geo.n_theta), par, [&](std::size_t j) {
    const double s = spec.sin_theta(j);
    spec.intensity(j) = std::norm(amplitude(T, x, w, geo.R, s)) * interference_factor(s, geo.R, geo.M);
  });
  spec.orders = order_table(T, geo);
  return spec;
}

IntensityMap2D farfield_2d(const atom::AtomFieldParams& params, const atom::MediumParams& medium,
                           const Modulation2D& mod, const Geometry2D& geo, Parallel par) {
  params.validate();
  medium.validate();
  mod.validate();
  if (geo.n_samples < 256) {
    throw Error(ErrorCode::GridTooCoarse,
                "2D grid has " + std::to_string(geo.n_samples) + " intervals per period (< 256)");
  }
  require(std::isfinite(geo.R) && geo.R >= 1.0, "R must be >= 1");
  require(geo.M >= 1, "M must be >= 1");
  require(geo.n_theta >= 3, "n_theta must be >= 3");

  const int n = geo.n_samples;
  const Eigen::VectorXd x = cell_grid(n);
  const Eigen::VectorXd w = gregory_weights(n);
  Eigen::VectorXd tx(n + 1), ty(n + 1);
  for (int i = 0; i <= n; ++i) {
    tx(i) = mod.x.Delta_c0 * std::sin(2.0 * pi * mod.x.q * (x(i) - mod.x.x0));
    const double arg = 2.0 * pi * mod.x.q * (x(i) - mod.y0);
    switch (mod.kind_y) {
      case YKind::None: ty(i) = 0.0; break;
      case YKind::Sin: ty(i) = mod.Delta_cy * std::sin(arg); break;
      case YKind::Cos: ty(i) = mod.Delta_cy * std::cos(arg); break;
    }
  }
  Eigen::MatrixXd dc(n + 1, n + 1);
  std::map<double, std::size_t> index;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      dc(i, j) = tx(i) + ty(j);
      index.emplace(dc(i, j), 0);
    }
  std::vector<double> values;
  values.reserve(index.size());
  for (auto& [v, k] : index) {
    k = values.size();
    values.push_back(v);
  }
  std::vector<cd> T_unique(values.size());
  parallel_for(values.size(), par, [&](std::size_t k) {
    atom::AtomFieldParams p = params;
    p.Delta_c = values[k];
    p.delta_p = params.delta_p + mod.x.probe_follow * values[k];
    const cd chi = atom::susceptibility(p, medium);
    const double kl = medium.k_p() * medium.length_L;
    const double a = kl * chi.imag(), b = kl * chi.real();
    if (-a > 20.0) {
      throw Error(ErrorCode::OverflowGuard, "gain exponent " + std::to_string(-a) + " exceeds 20 at Delta_c = " +
                                                std::to_string(values[k]));
    }
    T_unique[k] = std::exp(-a) * std::polar(1.0, b);
  });
  Eigen::MatrixXcd T(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) T(i, j) = T_unique[index.at(dc(i, j))];

  IntensityMap2D map;
  map.sin_theta_x = uniform_sin_grid(geo.n_theta);
  map.sin_theta_y = map.sin_theta_x;
  const Eigen::MatrixXcd K = kernel_matrix(map.sin_theta_x, x, w, geo.R);
  const Eigen::MatrixXcd Efield = K * T * K.transpose();
  map.intensity.resize(geo.n_theta, geo.n_theta);
  for (int a = 0; a < geo.n_theta; ++a) {
    const double fx = interference_factor(map.sin_theta_x(a), geo.R, geo.M);
    for (int b = 0; b < geo.n_theta; ++b)
      map.intensity(a, b) = std::norm(Efield(a, b)) * fx * interference_factor(map.sin_theta_y(b), geo.R, geo.M);
  }
  return map;
}

void write_profile(std::ostream& os, const SusceptibilityProfile& profile) {
  const Eigen::VectorXcd T = transmission(profile);
  TableWriter t(os, {"x", "Re_chi", "Im_chi", "alpha", "beta", "Re_T", "Im_T"});
  for (Eigen::Index i = 0; i < profile.x.size(); ++i) {
    t.row({profile.x(i), profile.chi(i).real(), profile.chi(i).imag(), profile.alpha(i), profile.beta(i), T(i).real(),
           T(i).imag()});
  }
}

void write_spectrum(std::ostream& os, const DiffractionSpectrum& spectrum) {
  TableWriter t(os, {"sin_theta", "I"});
  for (Eigen::Index j = 0; j < spectrum.sin_theta.size(); ++j) t.row({spectrum.sin_theta(j), spectrum.intensity(j)});
}

void write_orders(std::ostream& os, const DiffractionSpectrum& spectrum) {
  TableWriter t(os, {"n", "sin_theta_n", "I_n"});
  for (const auto& o : spectrum.orders) t.row({std::to_string(o.n), format_value(o.sin_theta), format_value(o.intensity)});
}

void write_map(std::ostream& os, const IntensityMap2D& map) {
  TableWriter t(os, {"sin_theta_x", "sin_theta_y", "I"});
  for (Eigen::Index a = 0; a < map.sin_theta_x.size(); ++a) {
    if (a > 0) os << '\n';
    for (Eigen::Index b = 0; b < map.sin_theta_y.size(); ++b)
      t.row({map.sin_theta_x(a), map.sin_theta_y(b), map.intensity(a, b)});
  }
}

}  // namespace loopgrating::grating
