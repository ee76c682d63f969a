#include "uwofdm/receiver.hpp"

#include <cmath>

#include "uwofdm/dft.hpp"
#include "uwofdm/ofdm.hpp"
#include "uwofdm/rng.hpp"

namespace uwofdm {

CVec subtract_uw(const CVec& yd, const CVec& h_diag, const CVec& xu_d) {
  if (yd.size() != h_diag.size() || yd.size() != xu_d.size())
    throw std::invalid_argument("subtract_uw: dimension mismatch");
  return yd - h_diag.cwiseProduct(xu_d);
}

namespace {

// Shared construction for BLUE (rho = 0) and LMMSE: factorize
// G^H H^H H G + rho I and derive E plus the C_ee diagonal.
Equalizer linear_equalizer(const GeneratorMatrix& g, const CVec& h_diag,
                           double n_sigma_n2, double rho) {
  if (h_diag.size() != g.mat.rows())
    throw std::invalid_argument("equalizer: channel diagonal has wrong length");
  const CMat hg = h_diag.asDiagonal() * g.mat;
  const int nd = static_cast<int>(g.mat.cols());
  CMat m = hg.adjoint() * hg;
  m.diagonal().array() += rho;
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularChannelError("equalizer: H G is numerically rank deficient");
  // rcond guard: rank deficiency that still passes the LLT shows up as an
  // extreme condition number.
  if (rho == 0.0 && llt.rcond() < 1e-12)
    throw SingularChannelError("equalizer: ill-conditioned deep-null channel");
  const CMat inv = llt.solve(CMat::Identity(nd, nd));
  Equalizer eq;
  eq.e = llt.solve(hg.adjoint());
  eq.cee_diag = n_sigma_n2 * inv.diagonal().real();
  return eq;
}

}  // namespace

Equalizer blue_equalizer(const GeneratorMatrix& g, const CVec& h_diag, double n_sigma_n2) {
  return linear_equalizer(g, h_diag, n_sigma_n2, 0.0);
}

Equalizer lmmse_equalizer(const GeneratorMatrix& g, const CVec& h_diag,
                          double n_sigma_n2, double sigma_d2) {
  if (!(sigma_d2 > 0.0)) throw std::invalid_argument("lmmse_equalizer: sigma_d2 must be positive");
  return linear_equalizer(g, h_diag, n_sigma_n2, n_sigma_n2 / sigma_d2);
}

Equalizer ci_equalizer(const SystemConfig& cfg, const CVec& h_diag, double n_sigma_n2) {
  if (static_cast<int>(cfg.red_idx.size()) != cfg.n_u)
    throw ConfigError("ci_equalizer: systematic layout with redundant indices required");
  if (h_diag.size() != cfg.n_occupied())
    throw std::invalid_argument("ci_equalizer: channel diagonal has wrong length");
  const auto source = cfg.codeword_source();
  const int nd = cfg.n_d();
  Equalizer eq;
  eq.e = CMat::Zero(nd, cfg.n_occupied());
  eq.cee_diag.resize(nd);
  for (size_t pos = 0; pos < source.size(); ++pos) {
    const int j = source[pos];
    if (j >= nd) continue;  // redundant position, discarded
    const Complex hk = h_diag(static_cast<Eigen::Index>(pos));
    if (std::abs(hk) == 0.0)
      throw SingularChannelError("ci_equalizer: zero channel coefficient on a data subcarrier");
    eq.e(j, static_cast<Eigen::Index>(pos)) = 1.0 / hk;
    eq.cee_diag(j) = n_sigma_n2 / std::norm(hk);
  }
  return eq;
}

PreambleSpec PreambleSpec::make(const SystemConfig& cfg, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int na = cfg.n_occupied();
  CVec pattern(na);
  for (int k = 0; k < na; ++k) pattern(k) = (rng() & 1u) ? 1.0 : -1.0;
  PreambleSpec p;
  p.x_freq_d = pattern;
  p.x_time = idft(embed_occupied(cfg, pattern));
  return p;
}

CMat smoothing_matrix(const SystemConfig& cfg) {
  const CMat f = dft_matrix(cfg.n);
  const auto occ = cfg.occupied_idx();
  const int na = cfg.n_occupied();
  CMat s(na, cfg.n_u);  // B^T M1: occupied rows of the first n_u DFT columns
  for (int i = 0; i < na; ++i) s.row(i) = f.row(occ[static_cast<size_t>(i)]).head(cfg.n_u);
  const CMat gram = s.adjoint() * s;
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw ConfigError("smoothing_matrix: M1^H B B^T M1 is not positive definite");
  return s * llt.solve(s.adjoint());
}

ChannelEstimate estimate_channel(const TimeSymbol& y_p1, const TimeSymbol& y_p2,
                                 const PreambleSpec& preamble, const SystemConfig& cfg) {
  if (y_p1.size() != cfg.n || y_p2.size() != cfg.n)
    throw std::invalid_argument("estimate_channel: preamble symbols must have length n");
  const CVec y_mean = extract_occupied(cfg, dft(0.5 * (y_p1 + y_p2)));
  // Coarse estimate: division by +-1 equals multiplication.
  const CVec h1 = y_mean.cwiseProduct(preamble.x_freq_d);

  const CMat f = dft_matrix(cfg.n);
  const auto occ = cfg.occupied_idx();
  const int na = cfg.n_occupied();
  CMat s(na, cfg.n_u);
  for (int i = 0; i < na; ++i) s.row(i) = f.row(occ[static_cast<size_t>(i)]).head(cfg.n_u);

  Eigen::LLT<CMat> llt(s.adjoint() * s);
  if (llt.info() != Eigen::Success)
    throw ConfigError("estimate_channel: MVU system is not positive definite");
  ChannelEstimate est;
  est.h_hat = llt.solve(s.adjoint() * h1);
  est.h_hat_diag = s * est.h_hat;  // equals W h1
  return est;
}

}  // namespace uwofdm
