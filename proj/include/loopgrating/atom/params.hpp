#pragma once

#include <complex>

#include <Eigen/Dense>

namespace loopgrating::atom {

using cd = std::complex<double>;

/// Basis ordering of the loop-N atom.
enum Level : int { G = 0, E = 1, M = 2, B = 3 };

/// Coherence dephasing rates γ_μν (symmetric in μν), units 2π·MHz.
struct Dephasing {
  double eg = 3.0;
  double em = 3.0;
  double mb = 1.5;
  double gb = 1.5;
  double gm = 0.001;  // 1 kHz ground-state coherence
  double eb = 4.5;

  double rate(int i, int j) const;
};

/// Field amplitudes, phases, detunings and relaxation rates.
/// Rates and detunings in 2π·MHz, phases in radians.
struct AtomFieldParams {
  double omega_p = 0.01;
  double omega_c = 5.0;
  double omega_d = 5.0;
  double omega_m = 0.5;

  double phi_p = 0.0;
  double phi_c = 0.0;
  double phi_m = 0.0;

  double delta_p = 0.0;
  double Delta_c = 0.0;
  double delta_d = 0.0;

  double Gamma_eg = 3.0;
  double Gamma_em = 3.0;
  double Gamma_bm = 3.0;

  Dephasing gamma;

  /// Φ = φ_m + φ_c − φ_p reduced to [0, 2π).
  double loop_phase() const;

  /// Copy with (φ_p, φ_c, φ_m) = (0, 0, Phi).
  AtomFieldParams with_loop_phase(double Phi) const;

  /// Throws Error(OutOfRange) on negative amplitudes or non-positive rates.
  void validate() const;
};

/// Thin-medium parameters. chi_scale is the peak optical depth produced by
/// the reference grating (see susceptibility.hpp) at the reference medium.
struct MediumParams {
  double density_N = 4.0e10;  // cm^-3
  double length_L = 20.0;     // μm
  double lambda_p = 795.0;    // nm
  double chi_scale = 5.0;

  double k_p() const;  // 1/μm
  void validate() const;
};

/// Reduces an angle to [0, 2π).
double wrap_phase(double phi);

using DensityMatrix = Eigen::Matrix4cd;
using Vec16 = Eigen::Matrix<cd, 16, 1>;
using Mat16 = Eigen::Matrix<cd, 16, 16>;

/// Row-major vectorization index of ρ_ij.
constexpr int vec_index(int i, int j) { return 4 * i + j; }

Vec16 vectorize(const DensityMatrix& rho);
DensityMatrix unvectorize(const Vec16& v);

}  // namespace loopgrating::atom
