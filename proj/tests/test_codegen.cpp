// Generator matrix construction, transceiver costs, the constrained
// optimization machinery, and matrix persistence.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <numbers>
#include <random>

#include "uwofdm/codegen.hpp"
#include "uwofdm/config.hpp"
#include "uwofdm/dft.hpp"
#include "uwofdm/ofdm.hpp"
#include "uwofdm/rng.hpp"

using namespace uwofdm;

namespace {

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.n = 16;
  cfg.n_u = 4;
  cfg.zero_idx = {0, 8};
  cfg.red_idx = {2, 6, 10, 14};
  cfg.validate();
  return cfg;
}

CMat random_cmat(std::mt19937_64& rng, int rows, int cols) {
  CMat m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = randn_c(rng);
  return m;
}

RMat random_rmat(std::mt19937_64& rng, int n) {
  RMat m(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) m(r, c) = randn(rng);
  return m;
}

// Matrix with prescribed singular values via random unitary factors.
CMat matrix_with_singulars(std::mt19937_64& rng, int rows, const RVec& s) {
  const int cols = static_cast<int>(s.size());
  Eigen::HouseholderQR<CMat> qu(random_cmat(rng, rows, rows));
  Eigen::HouseholderQR<CMat> qv(random_cmat(rng, cols, cols));
  const CMat u = CMat(qu.householderQ()).leftCols(cols);
  const CMat v = qv.householderQ();
  return u * s.asDiagonal() * v.adjoint();
}

}  // namespace

TEST_CASE("systematic T yields a zero tail for the published layout") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    CVec d(cfg.n_d());
    for (int i = 0; i < cfg.n_d(); ++i) d(i) = randn_c(rng);
    const TimeSymbol x = assemble_tx(g, cfg, d, CVec::Zero(cfg.n_u));
    CHECK(zero_uw_residual(x, cfg.n_u) < 1e-9);
  }
  // Linearity: d = 0 maps to r = 0.
  CHECK((systematic_T(cfg) * CVec::Zero(cfg.n_d())).norm() == 0.0);
}

TEST_CASE("systematic T matches a hand-solved 2x2 system at N=8") {
  SystemConfig cfg;
  cfg.n = 8;
  cfg.n_u = 2;
  cfg.zero_idx = {};
  cfg.red_idx = {3, 7};
  cfg.validate();
  const CMat t = systematic_T(cfg);
  REQUIRE(t.rows() == 2);
  REQUIRE(t.cols() == 6);

  // Independent oracle: build the last two rows of F^{-1} directly and solve
  // the 2x2 system by the explicit inverse.
  const auto finv_entry = [&](int row, int col) {
    return std::polar(1.0 / 8.0, 2.0 * std::numbers::pi / 8.0 * row * col);
  };
  const std::vector<int> data = {0, 1, 2, 4, 5, 6};
  CMat m21(2, 6), m22(2, 2);
  for (int r = 0; r < 2; ++r) {
    for (int j = 0; j < 6; ++j) m21(r, j) = finv_entry(6 + r, data[j]);
    m22(r, 0) = finv_entry(6 + r, 3);
    m22(r, 1) = finv_entry(6 + r, 7);
  }
  const Complex det = m22(0, 0) * m22(1, 1) - m22(0, 1) * m22(1, 0);
  CMat m22_inv(2, 2);
  m22_inv << m22(1, 1) / det, -m22(0, 1) / det, -m22(1, 0) / det, m22(0, 0) / det;
  const CMat t_oracle = -m22_inv * m21;
  CHECK((t - t_oracle).norm() / t_oracle.norm() < 1e-12);
}

TEST_CASE("systematic construction rejects a degenerate redundant placement") {
  // Sixteen adjacent redundant subcarriers at N=128 leave the subsystem
  // conditioned beyond 1e16; the constructor must refuse and name the set.
  SystemConfig cfg;
  cfg.n = 128;
  cfg.n_u = 16;
  cfg.zero_idx = {0};
  cfg.red_idx = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  cfg.validate();
  CHECK_THROWS_WITH_AS(systematic_T(cfg), doctest::Contains("red_idx"), ConfigError);
}

TEST_CASE("redundant energy cost: zero mapping, diag oracle, clustering penalty") {
  const auto cfg = SystemConfig::ieee80211a();
  CHECK(redundant_energy_cost(CMat::Zero(16, 36), cfg) == 0.0);

  const CMat t = systematic_T(cfg);
  // Oracle: sum of per-subcarrier mean powers of the redundant symbols.
  const RVec powers = (t * t.adjoint()).diagonal().real();
  CHECK(redundant_energy_cost(t, cfg) ==
        doctest::Approx(cfg.sigma_d2 / cfg.n * powers.sum()).epsilon(1e-12));

  // A contiguous redundant block hugging the zero band costs far more than
  // the published spread-out placement.
  SystemConfig clustered = cfg;
  clustered.red_idx = {18, 19, 20, 21, 22, 23, 24, 25, 26, 38, 39, 40, 41, 42, 43, 44};
  clustered.validate();
  const double j_spread = redundant_energy_cost(t, cfg);
  const double j_clustered = redundant_energy_cost(systematic_T(clustered), clustered);
  CHECK(j_clustered > 10.0 * j_spread);
}

TEST_CASE("optimize_permutation: published set, local search improves monotonically") {
  const auto cfg = SystemConfig::ieee80211a();
  const std::vector<int> published = {2,  6,  10, 14, 17, 21, 24, 26,
                                      38, 40, 43, 47, 50, 54, 58, 62};
  CHECK(optimize_permutation(cfg, {PermutationStrategy::PaperDefault}) == published);

  const double j_paper = redundant_energy_cost(systematic_T(cfg), cfg);

  // Accept-if-better swaps can only improve on the start.
  PermutationStrategy from_paper{PermutationStrategy::LocalSearch, 5, 500, published};
  SystemConfig trial = cfg;
  trial.red_idx = optimize_permutation(cfg, from_paper);
  CHECK(redundant_energy_cost(systematic_T(trial), trial) <= j_paper + 1e-12);

  // From a random start the search lands close to the published optimum.
  PermutationStrategy random_start{PermutationStrategy::LocalSearch, 7, 10000, std::nullopt};
  SystemConfig found = cfg;
  found.red_idx = optimize_permutation(cfg, random_start);
  const double j_found = redundant_energy_cost(systematic_T(found), found);
  CHECK(j_found <= 1.05 * j_paper);
}

TEST_CASE("cost_blue: orthonormal minimum, scale invariance, appendix formula") {
  const auto cfg = SystemConfig::ieee80211a();
  const CostSpec spec{Estimator::Blue, 1.0, 1.0};
  const auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  CHECK(cost_blue(q.mat, spec) == doctest::Approx(36.0).epsilon(1e-12));

  std::mt19937_64 rng(21);
  const CMat g = random_cmat(rng, 52, 36);
  const double j = cost_blue(g, spec);
  for (double beta : {0.5, 2.0, 10.0})
    CHECK(cost_blue(beta * g, spec) == doctest::Approx(j).epsilon(1e-10));

  // Singular values (1, 1, 1, 2) at n_d = 4: J = (1/4) * 7 * 3.25.
  RVec s(4);
  s << 2.0, 1.0, 1.0, 1.0;
  const CMat g4 = matrix_with_singulars(rng, 6, s);
  const CostSpec spec4{Estimator::Blue, 1.0, 1.0};
  CHECK(cost_blue(g4, spec4) == doctest::Approx(7.0 * 3.25 / 4.0).epsilon(1e-10));
}

TEST_CASE("cost_lmmse: orthonormal minimum, BLUE limit, appendix formula") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  CHECK(cost_lmmse(q.mat, {Estimator::Lmmse, 1.0, 1.0}) == doctest::Approx(18.0).epsilon(1e-12));

  std::mt19937_64 rng(22);
  const CMat g = random_cmat(rng, 52, 36);
  const double c_large = 1e6;
  const double j_b = cost_blue(g, {Estimator::Blue, c_large, 1.0});
  const double j_l = cost_lmmse(g, {Estimator::Lmmse, c_large, 1.0});
  CHECK(std::abs(j_l - j_b) / j_b < 1e-5);

  // Singular values (1, 2) at n_d = 2, c = 1: the diagonalized form gives
  // 2 - 2 (1/7 + 4/13) = 100/91.
  RVec s(2);
  s << 2.0, 1.0;
  const CMat g2 = matrix_with_singulars(rng, 4, s);
  CHECK(cost_lmmse(g2, {Estimator::Lmmse, 1.0, 1.0}) ==
        doctest::Approx(100.0 / 91.0).epsilon(1e-10));

  // noise-free limit: LMMSE cost approaches sigma_d2 * n_d as c -> 0.
  CHECK(cost_lmmse(g2, {Estimator::Lmmse, 1e-12, 1.0}) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("costs reject rank-deficient matrices") {
  CMat g = CMat::Zero(8, 4);
  g.col(0).setOnes();
  g.col(1) = g.col(0);
  CHECK_THROWS_AS(cost_blue(g, {Estimator::Blue, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(cost_lmmse(g, {Estimator::Lmmse, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("cost_from_singular_values matches both closed forms and the matrix costs") {
  const CostSpec blue{Estimator::Blue, 2.0, 1.5};
  const CostSpec lmmse{Estimator::Lmmse, 2.0, 1.5};
  RVec ones = RVec::Ones(36);
  CHECK(cost_from_singular_values(ones, blue) == doctest::Approx(1.5 * 36 / 2.0).epsilon(1e-12));
  CHECK(cost_from_singular_values(ones, lmmse) ==
        doctest::Approx(1.5 * 36 / 3.0).epsilon(1e-12));

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat g = random_cmat(rng, 20, 12);
    const RVec s = g.jacobiSvd().singularValues();
    CHECK(std::abs(cost_from_singular_values(s, blue) - cost_blue(g, blue)) /
              cost_blue(g, blue) <
          1e-10);
    CHECK(std::abs(cost_from_singular_values(s, lmmse) - cost_lmmse(g, lmmse)) /
              cost_lmmse(g, lmmse) <
          1e-10);
  }

  RVec bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(cost_from_singular_values(bad, blue), std::invalid_argument);
}

TEST_CASE("global minimum bound holds with equality only at equal singular values") {
  std::mt19937_64 rng(24);
  const CostSpec blue{Estimator::Blue, 1.0, 1.0};
  const CostSpec lmmse{Estimator::Lmmse, 1.0, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const CMat g = random_cmat(rng, 18, 10);
    const RVec s = g.jacobiSvd().singularValues();
    const double spread = (s(0) - s(9)) / s.mean();
    const double jb = cost_blue(g, blue);
    const double jl = cost_lmmse(g, lmmse);
    CHECK(jb >= cost_minimum(blue, 10) - 1e-12);
    CHECK(jl >= cost_minimum(lmmse, 10) - 1e-12);
    if (jb <= cost_minimum(blue, 10) + 1e-10) CHECK(spread < 1e-8);
    if (spread > 1e-3) {
      CHECK(jb > cost_minimum(blue, 10) + 1e-12);
      CHECK(jl > cost_minimum(lmmse, 10) + 1e-12);
    }
  }
}

TEST_CASE("finite-difference gradient of the singular-value cost") {
  const CostSpec blue{Estimator::Blue, 1.0, 1.0};
  const auto grad = [&](const RVec& s, const CostSpec& spec) {
    RVec g(s.size());
    const double h = 1e-6;
    for (int i = 0; i < s.size(); ++i) {
      RVec p = s;
      p(i) += h;
      const double jp = cost_from_singular_values(p, spec);
      p(i) -= 2 * h;
      const double jm = cost_from_singular_values(p, spec);
      g(i) = (jp - jm) / (2 * h);
    }
    return g;
  };

  // Stationary exactly at equal singular values.
  for (double v : {0.5, 1.0, 3.0}) {
    CHECK(grad(RVec::Constant(8, v), blue).norm() < 1e-8);
    CHECK(grad(RVec::Constant(8, v), {Estimator::Lmmse, 1.0, 1.0}).norm() < 1e-8);
  }

  // A single perturbed entry produces a gradient component whose sign pushes
  // the entry back toward the common value.
  RVec s = RVec::Ones(4);
  s(2) = 1.1;
  CHECK(grad(s, blue)(2) > 0.0);
  s(2) = 0.9;
  CHECK(grad(s, blue)(2) < 0.0);
}

TEST_CASE("build_G_from_A reproduces the systematic matrix at A = I") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g_sys = systematic_generator(cfg);
  const auto g = build_G_from_A(RMat::Identity(52, 52), cfg);
  CHECK((g.mat - g_sys.mat).norm() / g_sys.mat.norm() < 1e-12);
}

TEST_CASE("build_G_from_A: constraint holds for 100 seeded random A") {
  const auto cfg = small_config();
  std::mt19937_64 rng(25);
  const int na = cfg.n_d() + cfg.n_r();
  for (int trial = 0; trial < 100; ++trial) {
    const RMat a = random_rmat(rng, na);
    const auto g = build_G_from_A(a, cfg);
    CVec d(cfg.n_d());
    for (int i = 0; i < cfg.n_d(); ++i) d(i) = randn_c(rng);
    const TimeSymbol x = assemble_tx(g, cfg, d, CVec::Zero(cfg.n_u));
    CHECK(zero_uw_residual(x, cfg.n_u) < 1e-9);
  }
}

TEST_CASE("uniform scaling of A cancels in the redundancy recomputation") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g1 = build_G_from_A(RMat::Identity(52, 52), cfg);
  const auto g2 = build_G_from_A(2.0 * RMat::Identity(52, 52), cfg);
  CHECK((g2.mat - 2.0 * g1.mat).norm() / g1.mat.norm() < 1e-12);
}

TEST_CASE("numeric_gradient: quadratic test function and difference order") {
  const auto frob2 = [](const RMat& a) { return a.squaredNorm(); };
  const RMat grad = numeric_gradient(frob2, RMat::Identity(6, 6), 1e-5);
  CHECK((grad - 2.0 * RMat::Identity(6, 6)).norm() < 1e-6);

  // Central differences are second order: on a cubic the error drops ~4x
  // when eps halves.
  const auto cubic = [](const RMat& a) { return std::pow(a(0, 0), 3); };
  RMat x = RMat::Constant(1, 1, 1.0);
  const double exact = 3.0;
  const double e1 = std::abs(numeric_gradient(cubic, x, 1e-3)(0, 0) - exact);
  const double e2 = std::abs(numeric_gradient(cubic, x, 5e-4)(0, 0) - exact);
  CHECK(e2 < 0.3 * e1);
}

TEST_CASE("steepest descent on the small layout reaches the closed-form minima") {
  const auto cfg = small_config();
  DescentOptions opts;
  opts.cost_tol = 1e-4;
  for (auto est : {Estimator::Lmmse, Estimator::Blue}) {
    const CostSpec spec{est, 1.0, 1.0};
    const auto res = steepest_descent(cfg, spec, DescentInit::Identity, 0, opts);
    CHECK(res.converged);
    CHECK(res.j_raw <= cost_minimum(spec, cfg.n_d()) * (1.0 + 1e-4));
    // Monotone non-increasing trace.
    for (size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] <= res.trace[i - 1]);
    // Returned matrix is normalized-orthonormal and feasible.
    const auto rep = certify_optimality(res.g, cfg, 1e-6);
    CHECK(rep.is_optimal);
    CHECK(std::abs(rep.s2 - 1.0) < 1e-9);
  }
}

TEST_CASE("random initializations find the same minimum through different matrices") {
  const auto cfg = small_config();
  const CostSpec spec{Estimator::Lmmse, 1.0, 1.0};
  DescentOptions opts;
  opts.cost_tol = 1e-4;
  const auto r1 = steepest_descent(cfg, spec, DescentInit::RandomGaussian, 101, opts);
  const auto r2 = steepest_descent(cfg, spec, DescentInit::RandomGaussian, 202, opts);
  CHECK(r1.converged);
  CHECK(r2.converged);
  CHECK(r1.j_raw == doctest::Approx(r2.j_raw).epsilon(2e-4));
  CHECK((r1.g.mat - r2.g.mat).norm() / r1.g.mat.norm() > 1e-3);
}

TEST_CASE("normalize rescales alpha-orthogonal matrices and rejects others") {
  const auto cfg = SystemConfig::ieee80211a();
  auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  GeneratorMatrix scaled = q;
  scaled.mat *= 2.0;
  scaled.s2 = 4.0;
  const auto back = normalize(scaled);
  CHECK((back.mat.adjoint() * back.mat - CMat::Identity(36, 36)).norm() < 1e-12);
  CHECK(back.s2 == 1.0);
  // Power-distribution identity: the sum over all mean power levels is n_d.
  CHECK((back.mat * back.mat.adjoint()).trace().real() == doctest::Approx(36.0).epsilon(1e-12));

  const auto sc = scfde_generator(64, 16);
  const auto sc_n = normalize(sc);
  CHECK((sc_n.mat * std::sqrt(64.0) - sc.mat).norm() < 1e-9);

  CHECK_THROWS_AS(normalize(systematic_generator(cfg)), std::invalid_argument);
}

TEST_CASE("certify_optimality separates systematic from optimum matrices") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  const auto rep_sys = certify_optimality(g, cfg, 1e-6);
  CHECK_FALSE(rep_sys.is_optimal);
  CHECK(rep_sys.ortho_residual > 1e-3);
  CHECK(rep_sys.constraint_residual < 1e-12);

  const auto rep_opt = certify_optimality(polish_to_optimum(g, cfg), cfg, 1e-6);
  CHECK(rep_opt.is_optimal);
}

TEST_CASE("SC/FDE generator: time-domain form, gram, optimality certificate") {
  const auto g = scfde_generator(8, 2);
  REQUIRE(g.mat.rows() == 8);
  REQUIRE(g.mat.cols() == 6);
  CHECK((g.mat.adjoint() * g.mat - 8.0 * CMat::Identity(6, 6)).norm() < 1e-12);

  const auto cfg = SystemConfig::single_carrier(8, 2);
  CVec d = CVec::Zero(6);
  d(0) = 1.0;
  const TimeSymbol x = assemble_tx(g, cfg, d, CVec::Zero(2));
  CVec expected = CVec::Zero(8);
  expected(0) = 1.0;
  CHECK((x - expected).norm() < 1e-12);

  const auto rep = certify_optimality(g, cfg, 1e-6);
  CHECK(rep.is_optimal);
  CHECK(rep.s2 == doctest::Approx(8.0).epsilon(1e-12));

  CHECK_THROWS_AS(scfde_generator(SystemConfig::ieee80211a()), ConfigError);
}

TEST_CASE("optimality is estimator agnostic") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  // The certificate conditions do not reference the estimator; an optimal
  // matrix hits both closed-form minima.
  for (double c : {0.5, 1.0, 4.0}) {
    CHECK(cost_blue(q.mat, {Estimator::Blue, c, 1.0}) ==
          doctest::Approx(cost_minimum({Estimator::Blue, c, 1.0}, 36)).epsilon(1e-10));
    CHECK(cost_lmmse(q.mat, {Estimator::Lmmse, c, 1.0}) ==
          doctest::Approx(cost_minimum({Estimator::Lmmse, c, 1.0}, 36)).epsilon(1e-10));
  }
}

TEST_CASE("column flip-conjugate symmetry of the systematic matrix") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  const auto rep = check_symmetry(g.mat);
  CHECK(rep.g_conj_symmetric);
  CHECK(rep.g_residual < 1e-9);

  std::mt19937_64 rng(26);
  const CMat noise = random_cmat(rng, 52, 36);
  CHECK_FALSE(check_symmetry(noise).g_conj_symmetric);

  const RMat id = RMat::Identity(52, 52);
  const auto rep_a = check_symmetry(g.mat, &id);
  REQUIRE(rep_a.a_symmetric.has_value());
  CHECK_FALSE(*rep_a.a_symmetric);  // identity is not flip symmetric
}

TEST_CASE("generator matrix files reload bit-exactly") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = polish_to_optimum(systematic_generator(cfg), cfg);
  const std::string path = "test_gen_matrix.txt";
  save_generator(g, path);
  const auto back = load_generator(path);
  REQUIRE(back.mat.rows() == g.mat.rows());
  REQUIRE(back.mat.cols() == g.mat.cols());
  CHECK(back.kind == g.kind);
  CHECK(back.s2 == g.s2);
  CHECK(back.zero_idx == g.zero_idx);
  CHECK(back.red_idx == g.red_idx);
  bool identical = true;
  for (Eigen::Index r = 0; r < g.mat.rows(); ++r)
    for (Eigen::Index c = 0; c < g.mat.cols(); ++c)
      identical = identical && back.mat(r, c).real() == g.mat(r, c).real() &&
                  back.mat(r, c).imag() == g.mat(r, c).imag();
  CHECK(identical);
  std::remove(path.c_str());
}
