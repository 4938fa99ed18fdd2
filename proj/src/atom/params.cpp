#include "loopgrating/atom/params.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "loopgrating/error.hpp"

namespace loopgrating::atom {

double Dephasing::rate(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == G && j == E) return eg;
  if (i == E && j == M) return em;
  if (i == M && j == B) return mb;
  if (i == G && j == B) return gb;
  if (i == G && j == M) return gm;
  if (i == E && j == B) return eb;
  return 0.0;
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

double AtomFieldParams::loop_phase() const { return wrap_phase(phi_m + phi_c - phi_p); }

AtomFieldParams AtomFieldParams::with_loop_phase(double Phi) const {
  AtomFieldParams p = *this;
  p.phi_p = 0.0;
  p.phi_c = 0.0;
  p.phi_m = Phi;
  return p;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, what);
}

void require_finite(double v, const char* name) {
  require(std::isfinite(v), std::string(name) + " must be finite");
}

}  // namespace

void AtomFieldParams::validate() const {
  for (auto [v, n] : {std::pair{omega_p, "omega_p"}, {omega_c, "omega_c"}, {omega_d, "omega_d"},
                      {omega_m, "omega_m"}}) {
    require_finite(v, n);
    require(v >= 0.0, std::string(n) + " must be >= 0");
  }
  for (auto [v, n] : {std::pair{phi_p, "phi_p"}, {phi_c, "phi_c"}, {phi_m, "phi_m"},
                      {delta_p, "delta_p"}, {Delta_c, "Delta_c"}, {delta_d, "delta_d"}}) {
    require_finite(v, n);
  }
  for (auto [v, n] : {std::pair{Gamma_eg, "Gamma_eg"}, {Gamma_em, "Gamma_em"}, {Gamma_bm, "Gamma_bm"},
                      {gamma.eg, "gamma_eg"}, {gamma.em, "gamma_em"}, {gamma.mb, "gamma_mb"},
                      {gamma.gb, "gamma_gb"}, {gamma.gm, "gamma_gm"}, {gamma.eb, "gamma_eb"}}) {
    require_finite(v, n);
    require(v > 0.0, std::string(n) + " must be > 0");
  }
}

double MediumParams::k_p() const { return 2.0 * std::numbers::pi / (lambda_p * 1e-3); }

void MediumParams::validate() const {
  for (auto [v, n] : {std::pair{density_N, "density_N"}, {length_L, "length_L"},
                      {lambda_p, "lambda_p"}, {chi_scale, "chi_scale"}}) {
    require(std::isfinite(v) && v > 0.0, std::string(n) + " must be > 0");
  }
}

Vec16 vectorize(const DensityMatrix& rho) {
  Vec16 v;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v(vec_index(i, j)) = rho(i, j);
  return v;
}

DensityMatrix unvectorize(const Vec16& v) {
  DensityMatrix rho;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho(i, j) = v(vec_index(i, j));
  return rho;
}

}  // namespace loopgrating::atom
