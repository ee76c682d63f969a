#include "uwofdm/codegen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "uwofdm/dft.hpp"
#include "uwofdm/rng.hpp"

namespace uwofdm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Assembly pieces shared by the constraint-preserving parametrization:
// F^{-1} B (columns indexed by occupied-subcarrier position, matching the
// rows of every generator matrix) plus the column gather realizing right
// multiplication by P.
struct AssemblyContext {
  explicit AssemblyContext(const SystemConfig& config) : cfg(config) {
    cfg.validate();
    na = cfg.n_d() + cfg.n_r();
    nd = cfg.n_d();
    nr = cfg.n_r();
    nu = cfg.n_u;

    const CMat finv = idft_matrix(cfg.n);
    const auto occ = cfg.occupied_idx();
    finv_b.resize(cfg.n, na);
    for (int i = 0; i < na; ++i) finv_b.col(i) = finv.col(occ[static_cast<size_t>(i)]);

    // inv[j] = occupied position carrying codeword source j.
    const auto source = cfg.codeword_source();
    inv.resize(source.size());
    for (size_t i = 0; i < source.size(); ++i) inv[static_cast<size_t>(source[i])] = static_cast<int>(i);

    const CMat tail = finv_b.bottomRows(nu);
    tail_re = tail.real();
    tail_im = tail.imag();
  }

  // A P: columns of A gathered by the permutation.
  RMat permute(const RMat& a) const {
    RMat ap(a.rows(), a.cols());
    for (int j = 0; j < static_cast<int>(inv.size()); ++j)
      ap.col(j) = a.col(inv[static_cast<size_t>(j)]);
    return ap;
  }

  // Bottom n_u rows of M~ = F^{-1} B A P.
  CMat tail_of(const RMat& ap) const {
    CMat mt(nu, na);
    mt.real() = tail_re * ap;
    mt.imag() = tail_im * ap;
    return mt;
  }

  SystemConfig cfg;
  int na = 0, nd = 0, nr = 0, nu = 0;
  CMat finv_b;           // n x na, columns ordered by the codeword
  RMat tail_re, tail_im; // last n_u rows of finv_b, split for real products
  std::vector<int> inv;
};

// T~ = -M~22^{-1} M~21 from the tail of M~; NaN-filled matrix on a
// numerically singular M~22.
bool solve_t(const AssemblyContext& ctx, const CMat& tail, double cond_limit, CMat& t_out) {
  const CMat m22 = tail.rightCols(ctx.nr);
  Eigen::PartialPivLU<CMat> lu(m22);
  if (!(lu.rcond() > 1.0 / cond_limit)) return false;
  t_out = -lu.solve(tail.leftCols(ctx.nd));
  return t_out.allFinite();
}

CMat generator_from(const AssemblyContext& ctx, const RMat& ap, const CMat& t) {
  // G~ = A P [I; T~] = (AP)_left + (AP)_right T~.
  CMat g(ctx.na, ctx.nd);
  const auto left = ap.leftCols(ctx.nd);
  const auto right = ap.rightCols(ctx.nr);
  g.real() = left + right * t.real();
  g.imag() = right * t.imag();
  return g;
}

// tr(M^{-1}) for Hermitian positive definite M via ||L^{-1}||_F^2.
bool trace_of_inverse(const CMat& m, double& out) {
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const CMat linv =
      llt.matrixL().solve(CMat::Identity(m.rows(), m.cols()));
  out = linv.squaredNorm();
  return true;
}

double cost_of_gram(const CMat& gram, const CostSpec& spec) {
  const int nd = static_cast<int>(gram.rows());
  const double trg = gram.trace().real();
  if (!(trg > 0.0) || !std::isfinite(trg)) return kNan;
  double trinv = 0.0;
  if (spec.estimator == Estimator::Blue) {
    if (!trace_of_inverse(gram, trinv)) return kNan;
    return spec.sigma_d2 / (spec.c * nd) * trg * trinv;
  }
  const CMat shifted =
      (spec.c * nd / trg) * gram + CMat::Identity(nd, nd);
  if (!trace_of_inverse(shifted, trinv)) return kNan;
  return spec.sigma_d2 * trinv;
}

// Full cost evaluation J(A); NaN marks an infeasible point.
double cost_of_a(const AssemblyContext& ctx, const RMat& a, const CostSpec& spec,
                 double cond_limit) {
  const RMat ap = ctx.permute(a);
  CMat t;
  if (!solve_t(ctx, ctx.tail_of(ap), cond_limit, t)) return kNan;
  const CMat g = generator_from(ctx, ap, t);
  return cost_of_gram(g.adjoint() * g, spec);
}

RVec singular_values(const CMat& g) {
  return g.jacobiSvd().singularValues();
}

// Orthonormal basis of the nullspace of the zero-UW constraint rows.
CMat constraint_nullspace(const AssemblyContext& ctx) {
  const CMat k = ctx.finv_b.bottomRows(ctx.nu);
  Eigen::JacobiSVD<CMat> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-12 * sv(0) * std::max(ctx.na, ctx.nu))
    throw ConfigError("zero-UW constraint rows are rank deficient for this layout");
  return svd.matrixV().rightCols(ctx.na - ctx.nu);
}

GenKind kind_for(Estimator e) {
  return e == Estimator::Blue ? GenKind::OptBlue : GenKind::OptLmmse;
}

void stamp_layout(GeneratorMatrix& g, const SystemConfig& cfg) {
  g.n = cfg.n;
  g.n_u = cfg.n_u;
  g.zero_idx = cfg.zero_idx;
  g.red_idx = cfg.red_idx;
}

}  // namespace

std::string to_string(GenKind kind) {
  switch (kind) {
    case GenKind::Systematic: return "systematic";
    case GenKind::OptBlue: return "opt-blue";
    case GenKind::OptLmmse: return "opt-lmmse";
    case GenKind::ScFde: return "sc-fde";
  }
  return "unknown";
}

GenKind gen_kind_from_string(const std::string& s) {
  if (s == "systematic") return GenKind::Systematic;
  if (s == "opt-blue") return GenKind::OptBlue;
  if (s == "opt-lmmse") return GenKind::OptLmmse;
  if (s == "sc-fde") return GenKind::ScFde;
  throw ConfigError("unknown generator kind '" + s + "'");
}

void check_compatible(const GeneratorMatrix& g, const SystemConfig& cfg) {
  if (g.n != cfg.n || g.n_u != cfg.n_u || g.zero_idx != cfg.zero_idx)
    throw ConfigError("generator matrix layout does not match the system config");
  if (g.kind == GenKind::Systematic && g.red_idx != cfg.red_idx)
    throw ConfigError("systematic generator was built for a different redundant index set");
  if (g.mat.rows() != cfg.n_d() + cfg.n_r() || g.mat.cols() != cfg.n_d())
    throw ConfigError("generator matrix has wrong dimensions for the config");
}

CMat systematic_T(const SystemConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(cfg.red_idx.size()) != cfg.n_u)
    throw ConfigError("systematic construction needs n_u redundant subcarrier indices");
  const auto data = cfg.data_idx();
  const auto red = cfg.red_idx;
  const int nu = cfg.n_u;
  // Only the last n_u rows of F^{-1} enter T; build them from the kernel.
  const double w = 2.0 * std::numbers::pi / cfg.n;
  auto finv_tail = [&](int col, int tail_row) {
    const int l = cfg.n - nu + tail_row;
    return std::polar(1.0 / cfg.n, w * static_cast<double>(l) * col);
  };
  CMat m21(nu, cfg.n_d()), m22(nu, cfg.n_r());
  for (size_t j = 0; j < data.size(); ++j)
    for (int r = 0; r < nu; ++r) m21(r, static_cast<int>(j)) = finv_tail(data[j], r);
  for (size_t j = 0; j < red.size(); ++j)
    for (int r = 0; r < nu; ++r) m22(r, static_cast<int>(j)) = finv_tail(red[j], r);

  Eigen::JacobiSVD<CMat> svd(m22, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12) {
    std::ostringstream msg;
    msg << "singular redundant-subcarrier subsystem M22 for red_idx = {";
    for (size_t i = 0; i < red.size(); ++i) msg << (i ? ", " : " ") << red[i];
    msg << " }";
    throw ConfigError(msg.str());
  }
  return -svd.solve(m21);
}

GeneratorMatrix systematic_generator(const SystemConfig& cfg) {
  const CMat t = systematic_T(cfg);
  const auto source = cfg.codeword_source();
  const int na = cfg.n_d() + cfg.n_r();
  CMat stacked(na, cfg.n_d());
  stacked.topRows(cfg.n_d()) = CMat::Identity(cfg.n_d(), cfg.n_d());
  stacked.bottomRows(cfg.n_r()) = t;
  GeneratorMatrix g;
  g.mat.resize(na, cfg.n_d());
  for (int i = 0; i < na; ++i) g.mat.row(i) = stacked.row(source[static_cast<size_t>(i)]);
  g.kind = GenKind::Systematic;
  const RVec s = singular_values(g.mat);
  g.s2 = s.squaredNorm() / static_cast<double>(s.size());
  stamp_layout(g, cfg);
  return g;
}

double redundant_energy_cost(const CMat& t, const SystemConfig& cfg) {
  return cfg.sigma_d2 / static_cast<double>(cfg.n) * t.squaredNorm();
}

std::vector<int> optimize_permutation(const SystemConfig& cfg,
                                      const PermutationStrategy& strategy) {
  if (strategy.kind == PermutationStrategy::PaperDefault) {
    const SystemConfig ref = SystemConfig::ieee80211a();
    if (cfg.n != ref.n || cfg.n_u != ref.n_u || cfg.zero_idx != ref.zero_idx)
      throw ConfigError("the published redundant index set applies to the 802.11a layout only");
    return ref.red_idx;
  }

  std::mt19937_64 rng(strategy.seed);
  const auto occ = cfg.occupied_idx();
  const int nu = cfg.n_u;

  auto cost_of = [&](std::vector<int> red) -> double {
    std::sort(red.begin(), red.end());
    SystemConfig trial = cfg;
    trial.red_idx = std::move(red);
    try {
      return redundant_energy_cost(systematic_T(trial), trial);
    } catch (const ConfigError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<int> current;
  if (strategy.initial) {
    current = *strategy.initial;
    if (static_cast<int>(current.size()) != nu)
      throw ConfigError("initial redundant set must contain n_u indices");
  } else {
    std::vector<int> pool = occ;
    std::shuffle(pool.begin(), pool.end(), rng);
    current.assign(pool.begin(), pool.begin() + nu);
  }
  double best = cost_of(current);

  std::unordered_set<int> in_set(current.begin(), current.end());
  std::vector<int> outside;
  for (int k : occ)
    if (!in_set.count(k)) outside.push_back(k);

  std::uniform_int_distribution<size_t> pick_in(0, current.size() - 1);
  std::uniform_int_distribution<size_t> pick_out(0, outside.size() - 1);
  for (int it = 0; it < strategy.iters; ++it) {
    const size_t a = pick_in(rng);
    const size_t b = pick_out(rng);
    std::swap(current[a], outside[b]);
    const double j = cost_of(current);
    if (j < best) {
      best = j;
    } else {
      std::swap(current[a], outside[b]);  // revert
    }
  }
  std::sort(current.begin(), current.end());
  return current;
}

double cost_blue(const CMat& g, const CostSpec& spec) {
  const CMat gram = g.adjoint() * g;
  const double j = cost_of_gram(gram, CostSpec{Estimator::Blue, spec.c, spec.sigma_d2});
  if (std::isnan(j)) throw std::invalid_argument("cost_blue: rank-deficient generator matrix");
  return j;
}

double cost_lmmse(const CMat& g, const CostSpec& spec) {
  const CMat gram = g.adjoint() * g;
  Eigen::LLT<CMat> rank_probe(gram);
  if (rank_probe.info() != Eigen::Success)
    throw std::invalid_argument("cost_lmmse: rank-deficient generator matrix");
  const double j = cost_of_gram(gram, CostSpec{Estimator::Lmmse, spec.c, spec.sigma_d2});
  if (std::isnan(j)) throw std::invalid_argument("cost_lmmse: rank-deficient generator matrix");
  return j;
}

double generator_cost(const CMat& g, const CostSpec& spec) {
  return spec.estimator == Estimator::Blue ? cost_blue(g, spec) : cost_lmmse(g, spec);
}

double cost_from_singular_values(const RVec& s, const CostSpec& spec) {
  const int nd = static_cast<int>(s.size());
  if (nd == 0) throw std::invalid_argument("cost_from_singular_values: empty vector");
  for (int i = 0; i < nd; ++i)
    if (!(s(i) > 0.0))
      throw std::invalid_argument("cost_from_singular_values: singular values must be positive");
  const RVec s2 = s.array().square();
  const double sum2 = s2.sum();
  if (spec.estimator == Estimator::Blue) {
    const double suminv = s2.array().inverse().sum();
    return spec.sigma_d2 / (spec.c * nd) * sum2 * suminv;
  }
  double acc = 0.0;
  for (int i = 0; i < nd; ++i) acc += s2(i) / (spec.c * nd * s2(i) + sum2);
  return spec.sigma_d2 * nd - spec.sigma_d2 * spec.c * nd * acc;
}

double cost_minimum(const CostSpec& spec, int n_d) {
  return spec.estimator == Estimator::Blue ? spec.sigma_d2 * n_d / spec.c
                                           : spec.sigma_d2 * n_d / (spec.c + 1.0);
}

GeneratorMatrix build_G_from_A(const RMat& a, const SystemConfig& cfg) {
  const AssemblyContext ctx(cfg);
  if (a.rows() != ctx.na || a.cols() != ctx.na)
    throw std::invalid_argument("build_G_from_A: A must be (n_d+n_r) square");
  const RMat ap = ctx.permute(a);
  CMat t;
  if (!solve_t(ctx, ctx.tail_of(ap), 1e12, t))
    throw std::invalid_argument("build_G_from_A: singular M~22 for this A");
  GeneratorMatrix g;
  g.mat = generator_from(ctx, ap, t);
  g.kind = GenKind::OptLmmse;
  const RVec s = singular_values(g.mat);
  g.s2 = s.squaredNorm() / static_cast<double>(s.size());
  stamp_layout(g, cfg);
  return g;
}

RMat numeric_gradient(const std::function<double(const RMat&)>& cost, const RMat& a,
                      double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("numeric_gradient: eps must be positive");
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  RMat grad(rows, cols);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (int idx = 0; idx < rows * cols; ++idx) {
    const int i = idx % rows;
    const int j = idx / rows;
    const double step = eps * (1.0 + std::abs(a(i, j)));
    RMat probe = a;
    probe(i, j) = a(i, j) + step;
    const double jp = cost(probe);
    probe(i, j) = a(i, j) - step;
    const double jm = cost(probe);
    grad(i, j) = (jp - jm) / (2.0 * step);
  }
  return grad;
}

GeneratorMatrix normalize(const GeneratorMatrix& g, double spread_tol) {
  const RVec s = singular_values(g.mat);
  const double s_mean = std::sqrt(s.squaredNorm() / static_cast<double>(s.size()));
  const double spread = (s(0) - s(s.size() - 1)) / s_mean;
  if (!(spread <= spread_tol))
    throw std::invalid_argument("normalize: input is not close to alpha-orthogonal (spread " +
                                std::to_string(spread) + ")");
  GeneratorMatrix out = g;
  out.mat /= s_mean;
  out.s2 = 1.0;
  return out;
}

GeneratorMatrix polish_to_optimum(const GeneratorMatrix& g, const SystemConfig& cfg) {
  check_compatible(g, cfg);
  const AssemblyContext ctx(cfg);
  const CMat q = constraint_nullspace(ctx);
  const CMat projected = q * (q.adjoint() * g.mat);
  Eigen::JacobiSVD<CMat> svd(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);
  GeneratorMatrix out = g;
  out.mat = svd.matrixU() * svd.matrixV().adjoint();
  out.s2 = 1.0;
  return out;
}

OptimalityReport certify_optimality(const GeneratorMatrix& g, const SystemConfig& cfg,
                                    double tol) {
  check_compatible(g, cfg);
  const AssemblyContext ctx(cfg);
  OptimalityReport rep;
  const RVec s = singular_values(g.mat);
  rep.s2 = s.squaredNorm() / static_cast<double>(s.size());
  rep.singular_value_spread =
      (s(0) - s(s.size() - 1)) / std::sqrt(rep.s2);
  const CMat gram = g.mat.adjoint() * g.mat;
  const int nd = static_cast<int>(g.mat.cols());
  rep.ortho_residual =
      (gram - rep.s2 * CMat::Identity(nd, nd)).norm() / (rep.s2 * std::sqrt(nd));
  rep.constraint_residual =
      (ctx.finv_b.bottomRows(ctx.nu) * g.mat).norm() / g.mat.norm();
  rep.is_optimal = rep.ortho_residual < tol && rep.constraint_residual < tol;
  return rep;
}

GeneratorMatrix scfde_generator(const SystemConfig& cfg) {
  cfg.validate();
  if (!cfg.zero_idx.empty())
    throw ConfigError("SC/FDE generator requires a layout without zero subcarriers");
  GeneratorMatrix g;
  g.mat = dft_matrix(cfg.n).leftCols(cfg.n_d());
  g.kind = GenKind::ScFde;
  g.s2 = static_cast<double>(cfg.n);
  stamp_layout(g, cfg);
  return g;
}

GeneratorMatrix scfde_generator(int n, int n_r) {
  return scfde_generator(SystemConfig::single_carrier(n, n_r));
}

SymmetryReport check_symmetry(const CMat& g, const RMat* a, double tol) {
  SymmetryReport rep;
  const int nd = static_cast<int>(g.cols());
  if (nd % 2 != 0) throw std::invalid_argument("check_symmetry: even column count required");
  double num = 0.0;
  for (int i = 0; i < nd / 2; ++i) {
    const CVec expect = g.col(i).reverse().conjugate();
    num += (g.col(nd - 1 - i) - expect).squaredNorm();
  }
  rep.g_residual = std::sqrt(2.0 * num) / g.norm();
  rep.g_conj_symmetric = rep.g_residual < tol;
  if (a != nullptr) {
    const int na = static_cast<int>(a->cols());
    if (na % 2 != 0) throw std::invalid_argument("check_symmetry: even column count required");
    double anum = 0.0;
    for (int i = 0; i < na / 2; ++i)
      anum += (a->col(na - 1 - i) - a->col(i).reverse()).squaredNorm();
    rep.a_residual = std::sqrt(2.0 * anum) / a->norm();
    rep.a_symmetric = rep.a_residual < tol;
  }
  return rep;
}

// --- Steepest descent --------------------------------------------------------

DescentResult steepest_descent(const SystemConfig& cfg, const CostSpec& spec,
                               DescentInit init, uint64_t seed, const DescentOptions& opts) {
  const AssemblyContext ctx(cfg);
  std::atomic<long long> evals{0};
  auto cost = [&](const RMat& a) -> double {
    evals.fetch_add(1, std::memory_order_relaxed);
    return cost_of_a(ctx, a, spec, opts.cond_limit);
  };

#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

  std::mt19937_64 rng(seed);
  RMat a;
  double j = kNan;
  for (int attempt = 0; attempt < 16; ++attempt) {
    if (init == DescentInit::Identity) {
      a = RMat::Identity(ctx.na, ctx.na);
    } else {
      a.resize(ctx.na, ctx.na);
      for (int col = 0; col < ctx.na; ++col)
        for (int row = 0; row < ctx.na; ++row) a(row, col) = randn(rng);
    }
    j = cost(a);
    if (std::isfinite(j)) break;
    if (init == DescentInit::Identity)
      throw ConfigError("steepest_descent: infeasible identity initialization");
  }
  if (!std::isfinite(j))
    throw ConfigError("steepest_descent: could not find a feasible random initialization");

  DescentResult res;
  res.trace.push_back(j);

  // The closed-form global minimum is known for both costs, so reaching it
  // within tolerance is the primary stop; stagnation is the fallback.
  const double j_min = cost_minimum(spec, ctx.nd);
  auto reached_target = [&](double value) {
    const double target = opts.target_cost.value_or(j_min);
    return value <= target * (1.0 + (opts.target_cost ? opts.target_rel : opts.cost_tol));
  };

  const bool plain = std::getenv("UWOFDM_PLAIN_LS") != nullptr;  // experiment hook
  double step = 1.0;
  int stagnant = 0;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    if (reached_target(j)) break;

    const RMat grad = numeric_gradient(cost, a, opts.eps);
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    const RMat dir = plain ? RMat(-grad) : RMat(-grad / gnorm);

    // Backtracking: halve until J decreases, growing the trial step on
    // every success keeps the search adaptive without a schedule.
    double mu = plain ? 1.0 : step;
    double j_new = kNan;
    RMat a_new;
    bool accepted = false;
    while (mu >= opts.min_step) {
      a_new = a + mu * dir;
      j_new = cost(a_new);
      if (std::isfinite(j_new) && j_new < j) {
        accepted = true;
        break;
      }
      mu *= 0.5;
    }
    if (!accepted) break;  // no descent direction at resolvable step size

    const double rel_impr = (j - j_new) / j;
    a.swap(a_new);
    j = j_new;
    res.trace.push_back(j);
    step = mu * 2.0;
    stagnant = rel_impr < opts.rel_tol ? stagnant + 1 : 0;
    if (stagnant >= opts.tol_streak) {
      ++iter;
      break;
    }
  }

  res.a = a;
  res.j_raw = j;
  res.iterations = iter;
  res.cost_evals = evals.load();

  GeneratorMatrix raw = build_G_from_A(a, cfg);
  raw.kind = kind_for(spec.estimator);
  GeneratorMatrix normed = normalize(raw, /*spread_tol=*/0.5);
  res.g = polish_to_optimum(normed, cfg);
  res.g.kind = raw.kind;

  const auto rep = certify_optimality(res.g, cfg, opts.ortho_tol);
  const bool cost_ok = j <= j_min * (1.0 + opts.cost_tol);
  res.converged = cost_ok && rep.is_optimal;
  if (!res.converged) {
    std::ostringstream d;
    d << "best-so-far: J = " << std::setprecision(12) << j << " vs closed-form minimum "
      << j_min << " (relative gap " << (j / j_min - 1.0) << "), ortho residual "
      << rep.ortho_residual << ", constraint residual " << rep.constraint_residual;
    res.diagnostic = d.str();
  }
  return res;
}

// --- Persistence -------------------------------------------------------------

void save_generator(const GeneratorMatrix& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write generator matrix file " + path);
  out << "# uwofdm generator matrix v1\n";
  out << "kind " << to_string(g.kind) << "\n";
  out << "n " << g.n << "\n";
  out << "n_u " << g.n_u << "\n";
  out << "n_d " << g.n_d() << "\n";
  out << "n_r " << g.n_r() << "\n";
  out << std::setprecision(17) << "s2 " << g.s2 << "\n";
  out << "zero_idx";
  for (int k : g.zero_idx) out << ' ' << k;
  out << "\nred_idx";
  for (int k : g.red_idx) out << ' ' << k;
  out << "\nmat\n";
  for (Eigen::Index r = 0; r < g.mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.mat.cols(); ++c) {
      if (c) out << ' ';
      out << g.mat(r, c).real() << ' ' << g.mat(r, c).imag();
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failure on generator matrix file " + path);
}

GeneratorMatrix load_generator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open generator matrix file " + path);
  GeneratorMatrix g;
  int nd = -1, nr = -1;
  std::string line;
  bool in_header = true;
  while (in_header && std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "kind") {
      std::string v;
      ls >> v;
      g.kind = gen_kind_from_string(v);
    } else if (key == "n") ls >> g.n;
    else if (key == "n_u") ls >> g.n_u;
    else if (key == "n_d") ls >> nd;
    else if (key == "n_r") ls >> nr;
    else if (key == "s2") ls >> g.s2;
    else if (key == "zero_idx") { int v; while (ls >> v) g.zero_idx.push_back(v); }
    else if (key == "red_idx") { int v; while (ls >> v) g.red_idx.push_back(v); }
    else if (key == "mat") in_header = false;
    else throw ConfigError("generator file: unknown key '" + key + "'");
  }
  if (nd <= 0 || nr < 0) throw ConfigError("generator file: missing dimensions");
  g.mat.resize(nd + nr, nd);
  for (Eigen::Index r = 0; r < g.mat.rows(); ++r)
    for (Eigen::Index c = 0; c < g.mat.cols(); ++c) {
      double re, im;
      if (!(in >> re >> im)) throw ConfigError("generator file: truncated matrix data");
      g.mat(r, c) = Complex(re, im);
    }
  return g;
}

}  // namespace uwofdm
