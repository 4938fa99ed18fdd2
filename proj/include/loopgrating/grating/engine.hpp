#pragma once

#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "loopgrating/atom/susceptibility.hpp"
#include "loopgrating/parallel.hpp"

namespace loopgrating::grating {

using atom::cd;

/// Δ_c(x) = Delta_c0·sin(2πq(x − x0)) over one grating period, x in units
/// of the period. The probe detuning follows as δ_p + probe_follow·Δ_c(x).
struct SpatialModulation {
  double Delta_c0 = 4.0;
  double q = 0.5;
  double x0 = 0.0;
  double probe_follow = 0.0;

  void validate() const;
};

enum class YKind { None, Sin, Cos };

struct Modulation2D {
  SpatialModulation x;
  YKind kind_y = YKind::Cos;
  double Delta_cy = 0.1;
  double y0 = 0.0;

  void validate() const;
};

struct GratingGeometry {
  double R = 6.0;         // period / probe wavelength
  int M = 10;             // illuminated periods
  int n_samples = 4096;   // intervals per period
  int n_theta = 2001;     // angular samples over sinθ ∈ [−1, 1]

  void validate() const;
  /// Largest order index with |n/R| ≤ 1.
  int max_order() const;
};

struct Geometry2D {
  double R = 6.0;
  int M = 10;
  int n_samples = 256;  // intervals per period along each axis
  int n_theta = 513;    // per axis, odd so that sinθ = 0 is on the grid
};

/// Sample positions x_i = −1/2 + i/n for i = 0..n. The last sample is the
/// left limit at the right cell edge: the modulation need not be periodic
/// across the cell boundary, so both edges are kept.
Eigen::VectorXd cell_grid(int n);

Eigen::VectorXd detuning_profile(const SpatialModulation& mod, const GratingGeometry& geo);

struct SusceptibilityProfile {
  Eigen::VectorXd x;
  Eigen::VectorXcd chi;
  Eigen::VectorXd alpha;  // k_p·L·Im χ
  Eigen::VectorXd beta;   // k_p·L·Re χ
  double Phi = 0.0;
  atom::SymmetryClass symmetry = atom::SymmetryClass::NoSymmetry;

  int intervals() const { return static_cast<int>(x.size()) - 1; }
};

/// Builds a profile from sampled χ on the closed cell grid.
SusceptibilityProfile make_profile(const Eigen::VectorXcd& chi, const atom::MediumParams& medium, double Phi);

/// Builds a profile directly from α, β (χ is reconstructed with k_p·L = 1).
SusceptibilityProfile profile_from_alpha_beta(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                                              double Phi = 0.0);

SusceptibilityProfile susceptibility_profile(const atom::AtomFieldParams& params, const atom::MediumParams& medium,
                                             const SpatialModulation& mod, const GratingGeometry& geo,
                                             atom::SolverMode mode = atom::SolverMode::Exact, Parallel par = {});

/// Mirror-pair fold residuals of Re χ and Im χ about x = 0.
struct SpatialParity {
  atom::FoldResiduals re;
  atom::FoldResiduals im;
  /// PT for (Re even, Im odd); NormalAPT / AbnormalAPT for (Re odd, Im even)
  /// with net loss / gain; NoSymmetry otherwise.
  atom::SymmetryClass inferred = atom::SymmetryClass::NoSymmetry;
};

SpatialParity spatial_parity(const SusceptibilityProfile& profile, double threshold = 1e-3);

/// T(x) = e^{−α(x)}·e^{iβ(x)}. Throws OverflowGuard if −α > 20 anywhere.
Eigen::VectorXcd transmission(const SusceptibilityProfile& profile);

/// E(s) = ∫_{−1/2}^{1/2} T(x) e^{−i2πxRs} dx with Gregory quadrature on the
/// closed cell grid.
cd farfield_amplitude(const Eigen::VectorXcd& T, double sin_theta, const GratingGeometry& geo);

/// (sin(Mu)/(M sin u))² with u = πRs; equals 1 at every order sinθ = n/R.
double interference_factor(double sin_theta, double R, int M);

struct DiffractionOrder {
  int n = 0;
  double sin_theta = 0.0;
  double intensity = 0.0;
  cd amplitude{};
};

struct DiffractionSpectrum {
  Eigen::VectorXd sin_theta;
  Eigen::VectorXd intensity;
  std::vector<DiffractionOrder> orders;  // n = −max_order..max_order

  /// Throws InvalidArgument when n is outside the table.
  const DiffractionOrder& order(int n) const;
};

/// Order table only (no dense angular scan).
std::vector<DiffractionOrder> order_table(const Eigen::VectorXcd& T, const GratingGeometry& geo);

/// I(θ) = |E|²·(sin(MπRs)/(M sin πRs))² on a grid uniform in s = sinθ,
/// normalised so that T ≡ 1 gives I(0) = 1, plus the order table.
DiffractionSpectrum intensity_spectrum(const Eigen::VectorXcd& T, const GratingGeometry& geo, Parallel par = {});

struct IntensityMap2D {
  Eigen::VectorXd sin_theta_x;
  Eigen::VectorXd sin_theta_y;
  Eigen::MatrixXd intensity;  // rows: θ_x, columns: θ_y
};

/// Δ_c(x, y) = Δ_cx·sin(2πq(x − x0)) + Δ_cy·{sin|cos}(2πq(y − y0)); χ is
/// evaluated once per distinct Δ_c value and the far field is the separable
/// quadrature E = K_x·T·K_yᵀ. Throws GridTooCoarse below 256 intervals.
IntensityMap2D farfield_2d(const atom::AtomFieldParams& params, const atom::MediumParams& medium,
                           const Modulation2D& mod, const Geometry2D& geo, Parallel par = {});

/// Columns x, Re χ, Im χ, α, β, Re T, Im T.
void write_profile(std::ostream& os, const SusceptibilityProfile& profile);
/// Columns sinθ, I.
void write_spectrum(std::ostream& os, const DiffractionSpectrum& spectrum);
/// Columns n, sinθ_n, I_n.
void write_orders(std::ostream& os, const DiffractionSpectrum& spectrum);
/// Columns sinθx, sinθy, I (blank line between θ_x blocks).
void write_map(std::ostream& os, const IntensityMap2D& map);

}  // namespace loopgrating::grating
