#pragma once

#include <Eigen/Dense>

#include "fopa/metrics.hpp"
#include "fopa/spectral.hpp"

namespace fopa {

// The four transformation kernels sampled on the grids. The δ(ω−ω′) part of
// h₁s and h₁i is stored as 1/step on the diagonal, so these are continuous
// kernel values, not discrete-mode matrices.
struct GreenFunctions {
  FrequencyGrid signal_grid;
  FrequencyGrid idler_grid;
  Eigen::MatrixXcd h1s;  // signal × signal
  Eigen::MatrixXcd h2s;  // signal × idler
  Eigen::MatrixXcd h1i;  // idler × idler
  Eigen::MatrixXcd h2i;  // idler × signal
  int n_trunc = 0;       // 0 for an exact resummation
  double gain = 0.0;

  // Discrete-mode Bogoliubov matrices: a_out = A a + B b†, b_out = C b + D a†.
  struct Modes {
    Eigen::MatrixXcd A, B, C, D;
  };
  Modes modes() const;
  static GreenFunctions from_modes(const FrequencyGrid& signal_grid,
                                   const FrequencyGrid& idler_grid, const Modes& m, int n_trunc,
                                   double gain);
};

inline constexpr int kEngineDefaultTrunc = 12;
inline constexpr double kEngineTailTolerance = 1e-10;

// Truncated power series of the Bogoliubov map driven by gain·ψ. With
// check_truncation, the relative spectral norm of the last retained term must
// be below kEngineTailTolerance.
GreenFunctions green_from_kernel(const JointSpectralKernel& kernel, double gain,
                                 int n_trunc = kEngineDefaultTrunc, bool check_truncation = true);

// Exact resummation through the singular value decomposition of the kernel.
GreenFunctions schmidt_oracle(const JointSpectralKernel& kernel, double gain);

// Max-norm residuals of the bosonic commutation constraints, in discrete-mode
// units: ρ_a = |A Dᵀ − B Cᵀ|, ρ_b = |A A† − B B† − 1|, ρ_c = |C C† − D D† − 1|.
struct UnitarityResiduals {
  double rho_a, rho_b, rho_c;
  double max() const;
};
UnitarityResiduals unitarity_residuals(const GreenFunctions& green);

// Largest singular value of B_a − B_b over the four discrete-mode blocks.
double green_distance(const GreenFunctions& a, const GreenFunctions& b);

struct ObservableOptions {
  // Add the input-independent spontaneous photons (per Ī₀ input photons) to
  // I_s and I_i. Off by default (|α|² ≫ 1).
  bool spontaneous = false;
  double input_photons = 1.0;
};

NoiseReport observables(const GreenFunctions& green, const SignalSpectrum& signal,
                        const DetectionChain& chain, const ObservableOptions& options = {});

// Direct nested-loop evaluation of the H terms, for grids of at most 32
// points. Used only to check the factored evaluation in observables().
HTerms observables_naive_hterms(const GreenFunctions& green, const SignalSpectrum& signal,
                                const DetectionChain& chain);

}  // namespace fopa
