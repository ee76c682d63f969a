// Code generator matrices for UW-OFDM: the systematic construction
// G = P [I; T], the non-systematic transceiver-cost optimization over
// G~ = A P [I; T~], optimality certification, and matrix persistence.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uwofdm/config.hpp"
#include "uwofdm/types.hpp"

namespace uwofdm {

enum class GenKind { Systematic, OptBlue, OptLmmse, ScFde };

std::string to_string(GenKind kind);
GenKind gen_kind_from_string(const std::string& s);

/// Complex (n_d+n_r) x n_d code generator matrix plus provenance metadata.
/// Every instance produced by this module satisfies the zero-UW constraint:
/// the last n_u rows of F^{-1} B mat vanish. Non-systematic kinds in
/// addition satisfy mat^H mat = s2 I (to tolerance).
struct GeneratorMatrix {
  CMat mat;
  GenKind kind = GenKind::Systematic;
  double s2 = 0.0;  // mean squared singular value; the common value when orthogonal

  // Subcarrier layout the matrix was built for.
  int n = 0;
  int n_u = 0;
  std::vector<int> zero_idx;
  std::vector<int> red_idx;

  int n_d() const { return static_cast<int>(mat.cols()); }
  int n_r() const { return static_cast<int>(mat.rows() - mat.cols()); }
};

/// Throws ConfigError when the matrix layout does not match cfg.
void check_compatible(const GeneratorMatrix& g, const SystemConfig& cfg);

enum class Estimator { Blue, Lmmse };

/// Transceiver cost specification: estimator choice and the fixed ratio
/// c = E_s / sigma_n^2 the optimization is run at.
struct CostSpec {
  Estimator estimator = Estimator::Lmmse;
  double c = 1.0;
  double sigma_d2 = 1.0;
};

// --- Systematic construction ----------------------------------------------

/// Redundant-subcarrier mapping T = -M22^{-1} M21 with M = F^{-1} B P.
/// Throws ConfigError when M22 is numerically singular for the configured
/// redundant index set.
CMat systematic_T(const SystemConfig& cfg);

/// G = P [I; T] for the configured layout.
GeneratorMatrix systematic_generator(const SystemConfig& cfg);

/// Energy cost J_E = (sigma_d^2 / n) tr(T T^H) of a systematic mapping.
double redundant_energy_cost(const CMat& t, const SystemConfig& cfg);

/// Redundant index placement strategies. PaperDefault returns the published
/// optimum set for the 802.11a layout; LocalSearch improves an index set by
/// accept-if-better pairwise swaps against J_E.
struct PermutationStrategy {
  enum Kind { PaperDefault, LocalSearch } kind = PaperDefault;
  uint64_t seed = 0;
  int iters = 10000;
  std::optional<std::vector<int>> initial;  // LocalSearch start; random when absent
};

std::vector<int> optimize_permutation(const SystemConfig& cfg,
                                      const PermutationStrategy& strategy);

// --- Transceiver cost functions -------------------------------------------

/// J_BLUE = (sigma_d^2 / (c n_d)) tr(G^H G) tr((G^H G)^{-1}).
/// Throws std::invalid_argument for rank-deficient G.
double cost_blue(const CMat& g, const CostSpec& spec);

/// J_LMMSE = sigma_d^2 tr( ((c n_d / tr(G^H G)) G^H G + I)^{-1} ).
double cost_lmmse(const CMat& g, const CostSpec& spec);

/// Dispatch on spec.estimator.
double generator_cost(const CMat& g, const CostSpec& spec);

/// The same costs as functions of the singular values alone: BLUE per the
/// product-of-sums form, LMMSE per the diagonalized form
/// sigma_d^2 n_d - sigma_d^2 c n_d sum_i s_i^2 / (c n_d s_i^2 + sum_j s_j^2).
/// Throws std::invalid_argument for nonpositive entries.
double cost_from_singular_values(const RVec& s, const CostSpec& spec);

/// Closed-form global minimum of the cost: sigma_d^2 n_d / c for the BLUE,
/// sigma_d^2 n_d / (c+1) for the LMMSE estimator.
double cost_minimum(const CostSpec& spec, int n_d);

// --- Constraint-preserving parametrization and optimization ---------------

/// G~ = A P [I; T~] with T~ = -M~22^{-1} M~21, M~ = F^{-1} B A P. Satisfies
/// the zero-UW constraint for every non-singular real A. Throws
/// std::invalid_argument when M~22 is numerically singular.
GeneratorMatrix build_G_from_A(const RMat& a, const SystemConfig& cfg);

/// Central-difference gradient approximation, entry step eps * (1 + |A_ij|).
/// Non-finite cost values at probe points propagate into the result.
RMat numeric_gradient(const std::function<double(const RMat&)>& cost,
                      const RMat& a, double eps = 1e-6);

enum class DescentInit { Identity, RandomGaussian };

struct DescentOptions {
  int max_iters = 50000;
  double rel_tol = 1e-10;  // relative improvement counted as stagnation
  int tol_streak = 10;     // consecutive stagnant iterations before stopping
  double eps = 1e-6;       // finite-difference scale
  double min_step = 1e-15;
  double cond_limit = 1e12;  // reject steps with cond(M~22) above this
  double ortho_tol = 1e-6;   // post-normalization orthogonality requirement
  double cost_tol = 1e-4;    // relative distance to the closed-form minimum
  // Stop as soon as J <= target * (1 + target_rel); unset runs to stagnation.
  std::optional<double> target_cost;
  double target_rel = 1e-4;
  int threads = 0;  // gradient worker threads; 0 picks the hardware count
};

struct DescentResult {
  RMat a;                     // optimizer variable at exit
  GeneratorMatrix g;          // normalized and polished generator matrix
  double j_raw = 0.0;         // final cost of the raw descent iterate
  std::vector<double> trace;  // accepted J values, monotone non-increasing
  long long cost_evals = 0;   // total cost-function evaluations
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

/// Steepest descent on J(A) with backtracking line search. The returned
/// generator matrix is normalized and polished; `trace` and `j_raw` describe
/// the raw descent. Non-convergence returns the best iterate with
/// converged = false and a diagnostic message.
DescentResult steepest_descent(const SystemConfig& cfg, const CostSpec& spec,
                               DescentInit init, uint64_t seed = 0,
                               const DescentOptions& opts = {});

// --- Normalization, certification, special constructions ------------------

/// Rescale so that the mean squared singular value is 1. Throws
/// std::invalid_argument when the singular value spread exceeds spread_tol
/// (input not close to alpha-orthogonal).
GeneratorMatrix normalize(const GeneratorMatrix& g, double spread_tol = 0.05);

/// Project the columns onto the zero-UW constraint nullspace and replace the
/// result with its polar factor (nearest matrix with orthonormal columns).
/// Output satisfies both optimality conditions to rounding.
GeneratorMatrix polish_to_optimum(const GeneratorMatrix& g, const SystemConfig& cfg);

struct OptimalityReport {
  double ortho_residual = 0.0;       // ||G^H G - s2 I||_F / (s2 sqrt(n_d))
  double constraint_residual = 0.0;  // zero-UW tail residual, relative
  double singular_value_spread = 0.0;  // (s_max - s_min) / s_mean
  double s2 = 0.0;
  bool is_optimal = false;
};

/// Check the two optimality conditions G^H G = s^2 I and the zero-UW
/// constraint; is_optimal iff both residuals are below tol.
OptimalityReport certify_optimality(const GeneratorMatrix& g,
                                    const SystemConfig& cfg, double tol = 1e-6);

/// Single-carrier generator G_SC = F_N [I; 0]; requires a layout without
/// zero subcarriers. G_SC^H G_SC = N I and the time-domain symbol is [d; 0].
GeneratorMatrix scfde_generator(const SystemConfig& cfg);
GeneratorMatrix scfde_generator(int n, int n_r);

struct SymmetryReport {
  bool g_conj_symmetric = false;
  double g_residual = 0.0;  // relative Frobenius residual of the column
                            // flip-conjugate symmetry of G
  std::optional<bool> a_symmetric;
  double a_residual = 0.0;  // flip symmetry of A when supplied
};

/// Column flip-conjugate symmetry of G (and flip symmetry of A when given).
SymmetryReport check_symmetry(const CMat& g, const RMat* a = nullptr,
                              double tol = 1e-9);

// --- Persistence -----------------------------------------------------------

/// Text format "uwofdm generator matrix v1": header with kind, layout and s2
/// followed by row-major "re im" pairs at full double precision; reloads
/// bit-exactly.
void save_generator(const GeneratorMatrix& g, const std::string& path);
GeneratorMatrix load_generator(const std::string& path);

}  // namespace uwofdm
