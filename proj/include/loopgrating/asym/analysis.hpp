#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "loopgrating/grating/engine.hpp"

namespace loopgrating::asym {

using atom::cd;
using atom::SymmetryClass;

/// Scattering integrals over one period with weight w = 1 + α + α²/2 and
/// γ_n(x) = 2nπx:
///   f′ = ∫wβ sin γ_n, f″ = ∫wβ cos γ_n,
///   g′ = ∫w(β²−2)/2 cos γ_n, g″ = ∫w(β²−2)/2 sin γ_n.
struct ScatteringCoefficients {
  int n = 0;
  double f_prime = 0.0;
  double f_dprime = 0.0;
  double g_prime = 0.0;
  double g_dprime = 0.0;
  double epsilon = 1.0;
  /// max(|α|, |β|) > 0.3: outside the regime where the expansion is meant
  /// to hold.
  bool outside_weak_regime = false;
};

ScatteringCoefficients scattering_coefficients(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, int n,
                                               double epsilon = 1.0);
ScatteringCoefficients scattering_coefficients(const grating::SusceptibilityProfile& profile, int n,
                                               double epsilon = 1.0);

/// E_n = [f′ε − g′ε²/2] + i[f″ε + g″ε²/2].
cd expansion_amplitude(const ScatteringCoefficients& c);

struct EtaValue {
  double eta = 0.0;   // clamped to [0, 1]
  double raw = 0.0;   // unclamped
  bool clamped = false;
};

/// η_n = |f′g′ − f″g″| / (f′² + f″²)·ε. Throws DegenerateOrder when the
/// denominator is below 1e−30.
EtaValue eta_expansion(const ScatteringCoefficients& c);

/// η_n = |I_n − I_{−n}| / (I_n + I_{−n}) from the order table. Throws
/// BothOrdersDark when the sum is below 1e−15.
double eta_exact(const grating::DiffractionSpectrum& spectrum, int n);
double eta_exact(const std::vector<grating::DiffractionOrder>& orders, int n);

struct SymmetryProducts {
  double fg_prime_product = 0.0;   // f′·g′ from half-period integrals
  double fg_dprime_product = 0.0;  // f″·g″ from half-period integrals
  double f_prime = 0.0;
  double f_dprime = 0.0;
  double eta_from_products = 0.0;        // |f′g′ − f″g″| / (f′² + f″²)·ε, unclamped
};

/// Half-period reductions of the scattering integrals, valid for exactly
/// symmetric inputs.
///   PT (α odd, β even):  f′ = 2∫₀^½ αβ sin,  g′ = ∫₀^½ (1+α²/2)(β²−2) cos,
///                        f″ = 2∫₀^½ (1+α²/2)β cos,  g″ = ∫₀^½ α(β²−2) sin
///   APT (α even, β odd): f′ = ∫₀^½ (2+2α+α²)β sin,
///                        g′ = ∫₀^½ (1+α+α²/2)(β²−2) cos,  f″ = g″ = 0
/// Throws WrongSymmetryClass for other classes.
SymmetryProducts symmetry_products(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, int n,
                                   SymmetryClass cls, double epsilon = 1.0);

/// Conjugate-function (circular Hilbert) transform of a periodic sequence:
/// multiplies the DFT by −i·sign(k) with the Nyquist bin zeroed, so that
/// H[cos 2πx] = sin 2πx.
Eigen::VectorXd hilbert_periodic(const Eigen::VectorXd& f);

struct KKResidual {
  /// Residuals of the orientation that fits better.
  double r_re_from_im = 0.0;
  double r_im_from_re = 0.0;
  /// true: Re = −H[Im], Im = H[Re] (χ boundary value of a function analytic
  /// in the upper half of the circle variable); false: the opposite signs.
  bool analytic_orientation = true;
  double r_re_from_im_other = 0.0;
  double r_im_from_re_other = 0.0;
};

/// Relative L2 residuals between the mean-removed Re/Im χ and the Hilbert
/// transforms of each other, on the periodic samples (the closing edge
/// sample is dropped).
KKResidual kk_residual(const grating::SusceptibilityProfile& profile);

struct AptChainCheck {
  int n = 1;
  double eta_analytic = 1.0;
  double ratio_a = 0.0;       // |g′/f′|
  double ratio_b = 0.0;       // |∫₀^½ β sin γ_n / ∫₀^½ (1+α) cos γ_n|
  double ratio_c = 0.0;       // ratio_b with β replaced by c·H[α]
  double residual_a = 0.0;    // |ratio − 1|
  double residual_b = 0.0;
  double residual_c = 0.0;
  double kk_scale = 0.0;      // least-squares c in β ≈ c·H[α − ᾱ] + β̄
  KKResidual kk;
};

/// Evaluates the pure-loss lopsidedness chain for order n. Throws
/// WrongSymmetryClass unless the profile is NormalAPT.
AptChainCheck apt_lopsided_check(const grating::SusceptibilityProfile& profile, int n = 1);

enum class SweepAxis { OmegaC, OmegaD, OmegaM };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

struct SweepRow {
  double value = 0.0;
  double Phi = 0.0;
  SymmetryClass phase_class = SymmetryClass::NoSymmetry;
  grating::SpatialParity parity;
  std::array<double, 3> eta_exact{};
  std::array<double, 3> eta_expansion{};
  std::array<bool, 3> eta_expansion_clamped{};
  std::array<double, 3> I_minus{};
  std::array<double, 3> I_plus{};
};

/// One full profile → transmission → order table → η evaluation per
/// (Phi, value) pair. Rows are ordered by Phi then value regardless of the
/// thread count.
std::vector<SweepRow> robustness_sweep(const atom::AtomFieldParams& base, const atom::MediumParams& medium,
                                       const grating::SpatialModulation& mod, const grating::GratingGeometry& geo,
                                       SweepAxis axis, const std::vector<double>& values,
                                       const std::vector<double>& Phi_list, Parallel par = {});

/// Columns sweep_value, class, eta{1,2,3}_{exact,exp}, I_{m,p}{1,2,3}.
void write_asymmetry_report(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace loopgrating::asym
