// UW subtraction, BLUE/LMMSE/CI equalizers, and preamble channel estimation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "uwofdm/channel.hpp"
#include "uwofdm/codegen.hpp"
#include "uwofdm/config.hpp"
#include "uwofdm/dft.hpp"
#include "uwofdm/ofdm.hpp"
#include "uwofdm/receiver.hpp"
#include "uwofdm/rng.hpp"

using namespace uwofdm;

namespace {

CVec random_cvec(std::mt19937_64& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = randn_c(rng);
  return v;
}

// sigma_n^2 realizing a given c = E_s / sigma_n^2 for a generator matrix.
double sigma_n2_for_c(const GeneratorMatrix& g, const SystemConfig& cfg, double c) {
  const double tr = g.mat.squaredNorm();
  return cfg.sigma_d2 * tr / (c * cfg.n * cfg.n_d());
}

}  // namespace

TEST_CASE("subtract_uw: zero word is a no-op, loopback residual vanishes") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  std::mt19937_64 rng(31);
  const CVec yd = random_cvec(rng, cfg.n_occupied());
  const CVec h = random_cvec(rng, cfg.n_occupied());
  CHECK((subtract_uw(yd, h, CVec::Zero(cfg.n_occupied())) - yd).norm() == 0.0);

  // Noiseless loopback with a unique word and perfect channel knowledge.
  const auto ch = gen_multipath(3, 100.0, cfg);
  CVec uw(cfg.n_u);
  for (int k = 0; k < cfg.n_u; ++k) uw(k) = 0.3 * std::polar(1.0, 0.7 * k);
  const CVec xu_d = extract_occupied(cfg, uw_spectrum(cfg, uw));
  const CVec d = random_cvec(rng, cfg.n_d());
  const TimeSymbol x = assemble_tx(g, cfg, d, uw);
  const TimeSymbol y = apply_channel(x, ch, {0.0}, rng, cfg.n_u);
  const CVec y_corr = subtract_uw(extract_occupied(cfg, dft(y)), ch.hd, xu_d);
  const CVec model = ch.hd.asDiagonal() * (g.mat * d);
  CHECK((y_corr - model).norm() / model.norm() < 1e-10);

  // With an imperfect channel estimate the leakage is (H - H_hat) B^T xu.
  const CVec h_hat = ch.hd * 0.95;
  const CVec leak = subtract_uw(extract_occupied(cfg, dft(y)), h_hat, xu_d) - y_corr;
  const CVec expected = (ch.hd - h_hat).asDiagonal() * xu_d;
  CHECK((leak - expected).norm() < 1e-10);
}

TEST_CASE("BLUE with identity channel and a normalized optimum matrix") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  const double c = 2.0;
  const double n_sigma_n2 = cfg.n * sigma_n2_for_c(q, cfg, c);
  const auto eq = blue_equalizer(q, CVec::Ones(cfg.n_occupied()), n_sigma_n2);
  // C_ee = (sigma_d^2 / c) I.
  for (int i = 0; i < cfg.n_d(); ++i)
    CHECK(eq.cee_diag(i) == doctest::Approx(cfg.sigma_d2 / c).epsilon(1e-10));
  // Orthonormal columns: the estimator is the adjoint.
  CHECK((eq.e - q.mat.adjoint()).norm() < 1e-10);
}

TEST_CASE("BLUE unbiasedness for random channels and both generator kinds") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g_sys = systematic_generator(cfg);
  const auto g_opt = polish_to_optimum(g_sys, cfg);
  const CMat eye = CMat::Identity(cfg.n_d(), cfg.n_d());
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto ch = gen_multipath(seed, 100.0, cfg);
    for (const auto* g : {&g_sys, &g_opt}) {
      const auto eq = blue_equalizer(*g, ch.hd, 1.0);
      CHECK((eq.e * ch.hd.asDiagonal() * g->mat - eye).norm() < 1e-9);
    }
  }
}

TEST_CASE("LMMSE equals BLUE at zero noise ratio and vanishes at infinite ratio") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  const auto ch = gen_multipath(8, 100.0, cfg);
  const auto blue = blue_equalizer(g, ch.hd, 1.0);
  const auto lmmse0 = lmmse_equalizer(g, ch.hd, 0.0, cfg.sigma_d2);
  CHECK((blue.e - lmmse0.e).norm() < 1e-10);
  const auto heavy = lmmse_equalizer(g, ch.hd, 1e12, cfg.sigma_d2);
  CHECK(heavy.e.norm() < 1e-6);
}

TEST_CASE("LMMSE with identity channel hits the closed-form error covariance") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  const double c = 1.0;
  const double n_sigma_n2 = cfg.n * sigma_n2_for_c(q, cfg, c);
  const auto eq = lmmse_equalizer(q, CVec::Ones(cfg.n_occupied()), n_sigma_n2, cfg.sigma_d2);
  // C_ee = sigma_d^2 / (c+1) I.
  for (int i = 0; i < cfg.n_d(); ++i)
    CHECK(eq.cee_diag(i) == doctest::Approx(cfg.sigma_d2 / (c + 1.0)).epsilon(1e-10));
}

TEST_CASE("per-symbol LMMSE error variance never exceeds the BLUE variance") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  for (uint64_t seed = 100; seed < 110; ++seed) {
    const auto ch = gen_multipath(seed, 100.0, cfg);
    const double n_sigma_n2 = 3.7;
    const auto blue = blue_equalizer(g, ch.hd, n_sigma_n2);
    const auto lmmse = lmmse_equalizer(g, ch.hd, n_sigma_n2, cfg.sigma_d2);
    for (int i = 0; i < cfg.n_d(); ++i) CHECK(lmmse.cee_diag(i) <= blue.cee_diag(i) + 1e-12);
  }
}

TEST_CASE("channel inversion receiver: identity channel, exact recovery, fade scaling") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto g = systematic_generator(cfg);
  std::mt19937_64 rng(32);

  const auto eq_id = ci_equalizer(cfg, CVec::Ones(cfg.n_occupied()), 1.0);
  const CVec d = random_cvec(rng, cfg.n_d());
  CHECK((eq_id.e * (g.mat * d) - d).norm() < 1e-12);

  const auto ch = gen_multipath(77, 100.0, cfg);
  const auto eq = ci_equalizer(cfg, ch.hd, 1.0);
  const CVec y = ch.hd.asDiagonal() * (g.mat * d);
  CHECK((eq.e * y - d).norm() / d.norm() < 1e-10);

  // Error variance scales as 1 / |H_k|^2 at the data positions.
  const auto source = cfg.codeword_source();
  const double n_sigma_n2 = 2.5;
  const auto eq_n = ci_equalizer(cfg, ch.hd, n_sigma_n2);
  for (size_t pos = 0; pos < source.size(); ++pos) {
    if (source[pos] >= cfg.n_d()) continue;
    CHECK(eq_n.cee_diag(source[pos]) ==
          doctest::Approx(n_sigma_n2 / std::norm(ch.hd(static_cast<Eigen::Index>(pos))))
              .epsilon(1e-12));
  }

  CVec dead = ch.hd;
  dead(5) = 0.0;
  CHECK_THROWS_AS(ci_equalizer(cfg, dead, 1.0), SingularChannelError);
  CHECK_THROWS_AS(ci_equalizer(SystemConfig::single_carrier(64, 16), ch.hd, 1.0), ConfigError);
}

TEST_CASE("smoothing matrix is a Hermitian idempotent projector of rank n_u") {
  const auto cfg = SystemConfig::ieee80211a();
  const CMat w = smoothing_matrix(cfg);
  CHECK((w * w - w).norm() < 1e-10);
  CHECK((w - w.adjoint()).norm() < 1e-10);
  CHECK(w.trace().real() == doctest::Approx(16.0).epsilon(1e-9));
  const RVec sv = w.jacobiSvd().singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > 0.5;
  CHECK(rank == 16);

  // Projector fixes the frequency response of any short impulse response.
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const CVec h = random_cvec(rng, cfg.n_u);
    const CVec target = to_freq(h, cfg);
    CHECK((w * target - target).norm() < 1e-10);
  }

  // And strictly shrinks anything outside the subspace.
  const CVec outside = random_cvec(rng, cfg.n_occupied());
  CHECK((w * outside).norm() < outside.norm());
}

TEST_CASE("noiseless preamble estimation is exact") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto preamble = PreambleSpec::make(cfg);
  std::mt19937_64 rng(34);
  for (uint64_t seed : {4ull, 9ull, 21ull}) {
    const auto ch = gen_multipath(seed, 100.0, cfg);
    const TimeSymbol y1 = apply_channel(preamble.x_time, ch, {0.0}, rng, cfg.n_u);
    const auto est = estimate_channel(y1, y1, preamble, cfg);
    CHECK((est.h_hat_diag - ch.hd).norm() < 1e-9);
    CHECK((est.h_hat - ch.h).norm() < 1e-9);
  }
}

TEST_CASE("smoothing reduces the estimation MSE by about the projector rank ratio") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto preamble = PreambleSpec::make(cfg);
  const CMat w = smoothing_matrix(cfg);
  std::mt19937_64 rng(35);
  const double sigma_n2 = 0.01;
  double mse_coarse = 0.0, mse_smooth = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto ch = gen_multipath(1000 + t, 100.0, cfg);
    const TimeSymbol y1 = apply_channel(preamble.x_time, ch, {sigma_n2}, rng, cfg.n_u);
    const TimeSymbol y2 = apply_channel(preamble.x_time, ch, {sigma_n2}, rng, cfg.n_u);
    const CVec coarse =
        extract_occupied(cfg, dft(0.5 * (y1 + y2))).cwiseProduct(preamble.x_freq_d);
    const auto est = estimate_channel(y1, y2, preamble, cfg);
    mse_coarse += (coarse - ch.hd).squaredNorm();
    mse_smooth += (est.h_hat_diag - ch.hd).squaredNorm();
    if (t == 0) CHECK((est.h_hat_diag - w * coarse).norm() < 1e-10);
  }
  CHECK(mse_smooth < mse_coarse);
  CHECK(mse_smooth / mse_coarse == doctest::Approx(16.0 / 52.0).epsilon(0.2));
}

TEST_CASE("AWGN QPSK hard decisions of BLUE and LMMSE are identical") {
  const auto cfg = SystemConfig::ieee80211a();
  const auto q = polish_to_optimum(systematic_generator(cfg), cfg);
  const CVec ones = CVec::Ones(cfg.n_occupied());
  std::mt19937_64 rng(36);
  for (double c : {1.0, 4.0}) {
    const double sigma_n2 = sigma_n2_for_c(q, cfg, c);
    const auto blue = blue_equalizer(q, ones, cfg.n * sigma_n2);
    const auto lmmse = lmmse_equalizer(q, ones, cfg.n * sigma_n2, cfg.sigma_d2);
    long long symbols = 0;
    long long mismatches = 0;
    while (symbols < 100000) {
      CVec d(cfg.n_d());
      const double a = std::sqrt(cfg.sigma_d2 / 2.0);
      for (int i = 0; i < cfg.n_d(); ++i)
        d(i) = Complex((rng() & 1) ? a : -a, (rng() & 1) ? a : -a);
      const TimeSymbol x = idft(embed_occupied(cfg, q.mat * d));
      CVec y = x + awgn(rng, cfg.n, sigma_n2);
      const CVec yd = extract_occupied(cfg, dft(y));
      const CVec d_blue = blue.e * yd;
      const CVec d_lmmse = lmmse.e * yd;
      for (int i = 0; i < cfg.n_d(); ++i) {
        const bool same = (d_blue(i).real() > 0) == (d_lmmse(i).real() > 0) &&
                          (d_blue(i).imag() > 0) == (d_lmmse(i).imag() > 0);
        mismatches += !same;
      }
      symbols += cfg.n_d();
    }
    CHECK(mismatches == 0);
  }
}
