#include "loopgrating/atom/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "loopgrating/error.hpp"

namespace loopgrating::atom {

namespace {

constexpr cd I{0.0, 1.0};

struct Coupling {
  int upper, lower;
  cd value;
};

Eigen::Matrix4cd assemble(const AtomFieldParams& p, cd cp, cd cc, cd cd_, cd cm) {
  Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
  H(E, E) = -p.delta_p;
  H(M, M) = -(p.delta_p - p.Delta_c);
  H(B, B) = -(p.delta_p - p.Delta_c + p.delta_d);
  const Coupling couplings[] = {{E, G, cp}, {E, M, cc}, {B, M, cd_}, {M, G, cm}};
  for (const auto& c : couplings) {
    H(c.upper, c.lower) -= c.value;
    H(c.lower, c.upper) -= std::conj(c.value);
  }
  return H;
}

LinearGenerator liouvillian(const AtomFieldParams& p, const Eigen::Matrix4cd& H) {
  LinearGenerator gen;
  Mat16& L = gen.G;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const int r = vec_index(i, j);
      for (int k = 0; k < 4; ++k) {
        L(r, vec_index(k, j)) += -I * H(i, k);
        L(r, vec_index(i, k)) += I * H(k, j);
      }
      if (i != j) L(r, r) -= p.gamma.rate(i, j);
    }
  }
  const struct {
    int from, to;
    double rate;
  } transfers[] = {{E, G, p.Gamma_eg}, {E, M, p.Gamma_em}, {B, M, p.Gamma_bm}};
  for (const auto& t : transfers) {
    L(vec_index(t.from, t.from), vec_index(t.from, t.from)) -= t.rate;
    L(vec_index(t.to, t.to), vec_index(t.from, t.from)) += t.rate;
  }
  return gen;
}

double max_abs_entry(const Mat16& G) { return G.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::Matrix4cd hamiltonian(const AtomFieldParams& p) {
  const double Phi = p.loop_phase();
  return assemble(p, p.omega_p, p.omega_c, p.omega_d, p.omega_m * std::exp(-I * Phi));
}

Eigen::Matrix4cd hamiltonian_raw_phases(const AtomFieldParams& p) {
  return assemble(p, p.omega_p * std::exp(-I * p.phi_p), p.omega_c * std::exp(-I * p.phi_c), p.omega_d,
                  p.omega_m * std::exp(-I * p.phi_m));
}

LinearGenerator build_generator(const AtomFieldParams& params) {
  params.validate();
  return liouvillian(params, hamiltonian(params));
}

LinearGenerator build_generator_raw_phases(const AtomFieldParams& params) {
  params.validate();
  return liouvillian(params, hamiltonian_raw_phases(params));
}

double generator_norm(const LinearGenerator& gen) { return gen.G.cwiseAbs().rowwise().sum().maxCoeff(); }

double spectral_gap(const LinearGenerator& gen) {
  Eigen::ComplexEigenSolver<Mat16> es(gen.G, false);
  const double scale = max_abs_entry(gen.G);
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 16; ++k) {
    const double mag = std::abs(es.eigenvalues()(k));
    if (mag > 1e-10 * scale) gap = std::min(gap, std::abs(es.eigenvalues()(k).real()));
  }
  return gap;
}

SteadyState steady_state_exact(const AtomFieldParams& params, const SteadyStateOptions& opt) {
  return steady_state_exact(build_generator(params), opt);
}

SteadyState steady_state_exact(const LinearGenerator& gen, const SteadyStateOptions& opt) {
  const double scale = max_abs_entry(gen.G);
  SteadyState out;

  Mat16 A = gen.G;
  Vec16 b = -gen.s;
  A.row(0).setZero();
  for (int k = 0; k < 4; ++k) A(0, vec_index(k, k)) = 1.0;
  b(0) = 1.0;

  Eigen::PartialPivLU<Mat16> lu(A);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  Vec16 x;
  // rcond() is only an estimate and misses exactly singular systems; check the pivots too.
  if (lu.rcond() > 1e-12 && pivots.minCoeff() > 1e-12 * pivots.maxCoeff()) {
    x = lu.solve(b);
  } else {
    // Inspect the kernel of the unconstrained generator directly.
    Eigen::JacobiSVD<Mat16> svd(gen.G, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int kernel = 0;
    for (int k = 0; k < 16; ++k)
      if (sv(k) <= 1e-10 * sv(0)) ++kernel;
    if (kernel != 1 || gen.s.norm() != 0.0) {
      throw Error(ErrorCode::DegenerateSteadyState,
                  "generator kernel has dimension " + std::to_string(kernel) + " (expected 1)");
    }
    x = svd.matrixV().col(15);
    cd trace = 0.0;
    for (int k = 0; k < 4; ++k) trace += x(vec_index(k, k));
    x /= trace;
    out.used_svd = true;
  }

  out.rho = unvectorize(x);
  out.residual = (gen.G * x + gen.s).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> herm(0.5 * (out.rho + out.rho.adjoint()), Eigen::EigenvaluesOnly);
  out.gain_warning = herm.eigenvalues().minCoeff() < -1e-6;

  if (opt.check_stability) {
    Eigen::ComplexEigenSolver<Mat16> es(gen.G, false);
    // Drop the single eigenvalue closest to zero (the steady state).
    int kernel_idx = 0;
    for (int k = 1; k < 16; ++k)
      if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(kernel_idx))) kernel_idx = k;
    out.max_growth_rate = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 16; ++k)
      if (k != kernel_idx) out.max_growth_rate = std::max(out.max_growth_rate, es.eigenvalues()(k).real());
    out.unstable = out.max_growth_rate > opt.growth_tolerance;
    if (out.unstable && opt.throw_on_unstable) {
      throw Error(ErrorCode::UnstableGain,
                  "non-kernel eigenvalue with Re λ = " + std::to_string(out.max_growth_rate));
    }
  }
  return out;
}

DensityMatrix evolve(const AtomFieldParams& params, const DensityMatrix& rho0, double t_final, double dt) {
  return evolve(build_generator(params), rho0, t_final, dt);
}

DensityMatrix evolve(const LinearGenerator& gen, const DensityMatrix& rho0, double t_final, double dt) {
  if (!(t_final >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_final must be >= 0");
  if (t_final == 0.0) return rho0;
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  const double norm = generator_norm(gen);
  if (!(dt * norm < 0.1)) {
    throw Error(ErrorCode::StepTooLarge,
                "dt·‖G‖ = " + std::to_string(dt * norm) + " violates the bound 0.1");
  }
  const auto steps = static_cast<long>(std::ceil(t_final / dt));
  const double h = t_final / static_cast<double>(steps);
  Vec16 y = vectorize(rho0);
  auto f = [&](const Vec16& v) -> Vec16 { return gen.G * v + gen.s; };
  for (long n = 0; n < steps; ++n) {
    const Vec16 k1 = f(y);
    const Vec16 k2 = f(y + 0.5 * h * k1);
    const Vec16 k3 = f(y + 0.5 * h * k2);
    const Vec16 k4 = f(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return unvectorize(y);
}

}  // namespace loopgrating::atom
