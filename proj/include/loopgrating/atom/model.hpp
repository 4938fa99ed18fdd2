#pragma once

#include "loopgrating/atom/params.hpp"

namespace loopgrating::atom {

/// d/dt vec(ρ) = G·vec(ρ) + s
struct LinearGenerator {
  Mat16 G = Mat16::Zero();
  Vec16 s = Vec16::Zero();
};

/// Rotating-frame Hamiltonian with the loop phase carried by the microwave
/// coupling alone: H_mg = −Ω_m e^{−iΦ}, all other couplings real.
Eigen::Matrix4cd hamiltonian(const AtomFieldParams& params);

/// Same Hamiltonian before the gauge reduction: every coupling carries its
/// own e^{−iφ}. Differs from hamiltonian() by a diagonal unitary.
Eigen::Matrix4cd hamiltonian_raw_phases(const AtomFieldParams& params);

/// Lindblad generator with coherent evolution, coherence dephasing γ_μν and
/// population transfer e→g, e→m, b→m. The closed model has s = 0.
LinearGenerator build_generator(const AtomFieldParams& params);
LinearGenerator build_generator_raw_phases(const AtomFieldParams& params);

struct SteadyState {
  DensityMatrix rho;
  double residual = 0.0;        // ‖G·vec ρ + s‖∞ / max|G_ij|
  bool used_svd = false;        // ill-conditioned constrained system
  bool gain_warning = false;    // ρ has an eigenvalue below −1e−6
  bool unstable = false;        // only set when stability is checked
  double max_growth_rate = 0.0; // largest Re λ over non-kernel modes
};

struct SteadyStateOptions {
  /// Eigen-decompose G to detect growing modes (costly; off for bulk sweeps).
  bool check_stability = false;
  /// With check_stability, throw UnstableGain instead of flagging.
  bool throw_on_unstable = false;
  double growth_tolerance = 1e-9;
};

/// Trace-constrained solve of G·vec ρ + s = 0. Falls back to SVD kernel
/// extraction when the constrained system has condition number > 1e12.
/// Throws DegenerateSteadyState if the kernel is not one-dimensional.
SteadyState steady_state_exact(const AtomFieldParams& params, const SteadyStateOptions& opt = {});
SteadyState steady_state_exact(const LinearGenerator& gen, const SteadyStateOptions& opt = {});

/// Classical RK4 integration with a uniform step ≤ dt. Requires
/// dt·‖G‖∞ < 0.1, otherwise throws StepTooLarge.
DensityMatrix evolve(const AtomFieldParams& params, const DensityMatrix& rho0, double t_final, double dt);
DensityMatrix evolve(const LinearGenerator& gen, const DensityMatrix& rho0, double t_final, double dt);

/// Row-sum norm ‖G‖∞.
double generator_norm(const LinearGenerator& gen);

/// Smallest |Re λ| among the non-zero eigenvalues of G (slowest relaxation).
double spectral_gap(const LinearGenerator& gen);

}  // namespace loopgrating::atom
