#pragma once

#include <string_view>
#include <vector>

#include "loopgrating/atom/model.hpp"

namespace loopgrating::atom {

struct PerturbativeCoherence {
  cd rho_eg_0;  // probe-free coherence, closed by the microwave loop
  cd rho_eg_1;  // linear response: ρ_eg ≈ ρ_eg_0 + ρ_eg_1·Ω_p
};

struct PerturbativeOptions {
  /// Skip the Ω_p ≤ 0.01·Ω_c weak-probe check.
  bool allow_strong_probe = false;
};

/// First-order expansion in Ω_p around the exact Ω_p = 0 steady state:
/// L0·ρ1 = −L1·ρ0 with Tr ρ1 = 0, solved on the full Liouville space.
PerturbativeCoherence coherence_perturbative(const AtomFieldParams& params,
                                             const PerturbativeOptions& opt = {});

/// The continued-fraction approximation with R_eg = γ_eg − iδ_p,
/// R_mg = γ_gm − i(δ_p − Δ_c), R_bg = γ_gb − i(δ_p − Δ_c + δ_d) and
/// populations from the Ω_p = 0 steady state. It drops the probe-free e–m
/// and m–b coherences, so it is a qualitative guide only.
PerturbativeCoherence closed_form_coherence(const AtomFieldParams& params,
                                            const PerturbativeOptions& opt = {});

enum class SolverMode { Exact, Perturbative };

/// Probe coherence per unit Ω_p, ⟨e|ρ|g⟩/Ω_p.
cd coherence_per_probe(const AtomFieldParams& params, SolverMode mode);

/// max Im(⟨e|ρ|g⟩/Ω_p) over the reference grating: default fields, Φ = π/2,
/// δ_p = 0, Δ_c = 4 sin(πx) sampled at x = −1/2 + i/4096, i = 0..4096.
/// Computed once per process.
double reference_peak_coherence();

/// χ_p = κ·⟨e|ρ|g⟩/Ω_p with κ fixed so that α = k_p·L·Im χ_p peaks at
/// chi_scale over the reference grating at the reference medium; κ scales
/// linearly with the density.
cd susceptibility(const AtomFieldParams& params, const MediumParams& medium, SolverMode mode = SolverMode::Exact);

/// Converts a per-probe coherence to χ_p (the linear map used above).
cd chi_from_coherence(cd coherence_per_probe, const MediumParams& medium);

struct AppendixCoefficients {
  double A0, B0, A1, B1;
  static constexpr int n_A0 = 2, n_B0 = 1, n_A1 = 3, n_B1 = 2;
};

/// Closed-form real/imaginary coefficients of the probe-free and linear
/// coherences at two-photon resonance with a common dephasing γ:
/// ρ_eg^(0) ≈ A0 − iB0, ρ_eg^(1) ≈ e^{−iΦ}(A1 − iB1).
/// Throws AssumptionViolated unless γ_eg = γ_em = γ_mb and δ_p = Δ_c.
AppendixCoefficients appendix_coefficients(const AtomFieldParams& params);

enum class SymmetryClass { PT, NormalAPT, AbnormalAPT, NoSymmetry };

std::string_view to_string(SymmetryClass c);

/// PT near mπ, NormalAPT near (4m+1)π/2, AbnormalAPT near (4m−1)π/2.
/// tol must lie in (0, π/8).
SymmetryClass classify_symmetry(double Phi, double tol = 1e-6);

enum class Parity { Even, Odd, None };

std::string_view to_string(Parity p);

struct FoldResiduals {
  double r_even = 0.0;
  double r_odd = 0.0;
  Parity parity = Parity::None;
};

/// Pairs sample k with n−1−k. r_even = max|f_k − f_{n−1−k}|/max|f|,
/// r_odd likewise with +. A parity is assigned when its residual < threshold.
FoldResiduals fold(const std::vector<double>& f, double threshold = 1e-3);

struct ParityReport {
  double Phi = 0.0;
  FoldResiduals re;
  FoldResiduals im;
  std::vector<double> delta;
  std::vector<cd> chi;

  bool conclusive() const { return re.parity != Parity::None && im.parity != Parity::None; }
};

/// Sweeps δ_p over a grid symmetric about 0 at loop phase Phi and folds
/// Re/Im χ_p. Never throws on inconclusive parity.
ParityReport parity_report(const AtomFieldParams& params, const std::vector<double>& delta_grid, double Phi,
                           double threshold = 1e-3, const MediumParams& medium = {});

/// As parity_report, but throws InconclusiveParity when either part has no
/// parity below threshold.
ParityReport verify_parity_frequency(const AtomFieldParams& params, const std::vector<double>& delta_grid,
                                     double Phi, double threshold = 1e-3, const MediumParams& medium = {});

/// Uniform grid of `count` points over [−span, span].
std::vector<double> symmetric_grid(double span, int count);

}  // namespace loopgrating::atom
