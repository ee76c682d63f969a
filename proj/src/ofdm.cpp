#include "uwofdm/ofdm.hpp"

#include <cmath>

#include "uwofdm/dft.hpp"

namespace uwofdm {

CMat selection_matrix(const SystemConfig& cfg) {
  const auto occ = cfg.occupied_idx();
  CMat b = CMat::Zero(cfg.n, static_cast<int>(occ.size()));
  for (size_t i = 0; i < occ.size(); ++i) b(occ[i], static_cast<int>(i)) = 1.0;
  return b;
}

FreqSymbol embed_occupied(const SystemConfig& cfg, const CVec& v) {
  const auto occ = cfg.occupied_idx();
  if (v.size() != static_cast<Eigen::Index>(occ.size()))
    throw std::invalid_argument("embed_occupied: expected length " + std::to_string(occ.size()));
  FreqSymbol x = FreqSymbol::Zero(cfg.n);
  for (size_t i = 0; i < occ.size(); ++i) x(occ[i]) = v(static_cast<Eigen::Index>(i));
  return x;
}

CVec extract_occupied(const SystemConfig& cfg, const CVec& x) {
  if (x.size() != cfg.n)
    throw std::invalid_argument("extract_occupied: expected length " + std::to_string(cfg.n));
  const auto occ = cfg.occupied_idx();
  CVec v(static_cast<Eigen::Index>(occ.size()));
  for (size_t i = 0; i < occ.size(); ++i) v(static_cast<Eigen::Index>(i)) = x(occ[i]);
  return v;
}

FreqSymbol uw_spectrum(const SystemConfig& cfg, const CVec& uw) {
  if (uw.size() != cfg.n_u)
    throw std::invalid_argument("uw_spectrum: unique word must have length n_u");
  CVec padded = CVec::Zero(cfg.n);
  padded.tail(cfg.n_u) = uw;
  return dft(padded);
}

TimeSymbol assemble_tx(const GeneratorMatrix& g, const SystemConfig& cfg,
                       const CVec& data, const CVec& uw) {
  check_compatible(g, cfg);
  if (data.size() != g.mat.cols())
    throw std::invalid_argument("assemble_tx: data vector must have length n_d");
  if (uw.size() != cfg.n_u)
    throw std::invalid_argument("assemble_tx: unique word must have length n_u");
  // x' = F^{-1}(B G d + F [0; uw]) = F^{-1} B G d + [0; uw].
  TimeSymbol x = idft(embed_occupied(cfg, g.mat * data));
  x.tail(cfg.n_u) += uw;
  return x;
}

double mean_symbol_energy(const GeneratorMatrix& g, const SystemConfig& cfg, const CVec& uw) {
  const double tr = g.mat.squaredNorm();  // tr(G^H G)
  return cfg.sigma_d2 / static_cast<double>(cfg.n) * tr + uw.squaredNorm();
}

double zero_uw_residual(const TimeSymbol& x, int n_u) {
  if (x.size() <= n_u) throw std::invalid_argument("zero_uw_residual: symbol shorter than n_u");
  const auto head = x.head(x.size() - n_u);
  const double rms = std::sqrt(head.squaredNorm() / static_cast<double>(head.size()));
  const double tail_max = x.tail(n_u).cwiseAbs().maxCoeff();
  return rms > 0.0 ? tail_max / rms : tail_max;
}

}  // namespace uwofdm
