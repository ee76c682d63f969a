// Receiver-side processing: UW influence subtraction, BLUE/LMMSE/CI data
// estimation with per-symbol error variances, and preamble-based channel
// estimation with subspace smoothing.

#pragma once

#include <cstdint>

#include "uwofdm/codegen.hpp"
#include "uwofdm/config.hpp"
#include "uwofdm/types.hpp"

namespace uwofdm {

/// Linear data estimator E (n_d x (n_d+n_r)) plus the main diagonal of the
/// post-estimation error covariance.
struct Equalizer {
  CMat e;
  RVec cee_diag;  // per-symbol error variances
};

/// y~ = y~_d - H~ B^T x~_u. All vectors downsized (length n_d + n_r);
/// xu_d is the downsized spectrum of the unique word.
CVec subtract_uw(const CVec& yd, const CVec& h_diag, const CVec& xu_d);

/// Best linear unbiased estimator E = (G^H H^H H G)^{-1} G^H H^H with
/// C_ee = n_sigma_n2 (G^H H^H H G)^{-1}; n_sigma_n2 is the frequency-domain
/// noise variance N sigma_n^2. Throws SingularChannelError when H G is
/// numerically rank deficient.
Equalizer blue_equalizer(const GeneratorMatrix& g, const CVec& h_diag,
                         double n_sigma_n2);

/// LMMSE estimator E = (G^H H^H H G + rho I)^{-1} G^H H^H with
/// rho = n_sigma_n2 / sigma_d2; identical to the BLUE at rho = 0.
Equalizer lmmse_equalizer(const GeneratorMatrix& g, const CVec& h_diag,
                          double n_sigma_n2, double sigma_d2);

/// Channel inversion receiver E = [I 0] H~^{-1} for the systematic layout:
/// per-subcarrier division at the data positions, redundancy discarded.
/// Throws SingularChannelError on a zero channel coefficient.
Equalizer ci_equalizer(const SystemConfig& cfg, const CVec& h_diag,
                       double n_sigma_n2);

// --- Preamble-based channel estimation --------------------------------------

/// Impulse-response estimate (length n_u) and smoothed frequency estimate.
struct ChannelEstimate {
  CVec h_hat;       // MVU impulse-response estimate
  CVec h_hat_diag;  // smoothed frequency response, length n_d + n_r
};

/// Two identical BPSK training symbols on the occupied subcarriers.
struct PreambleSpec {
  CVec x_freq_d;  // downsized +-1 pattern, length n_d + n_r
  CVec x_time;    // time-domain training symbol, length n

  static PreambleSpec make(const SystemConfig& cfg, uint64_t seed = 0x5eedu);
};

/// Smoothing matrix W = B^T M1 (M1^H B B^T M1)^{-1} M1^H B with M1 the first
/// n_u columns of F_N: the orthogonal projector onto the frequency responses
/// of impulse responses no longer than n_u. Channel independent.
CMat smoothing_matrix(const SystemConfig& cfg);

/// Estimate the channel from two received training symbols: coarse estimate
/// h1~[k] = mean(y)~[k] x_p~[k], MVU impulse response, smoothed frequency
/// estimate h2~ = W h1~.
ChannelEstimate estimate_channel(const TimeSymbol& y_p1, const TimeSymbol& y_p2,
                                 const PreambleSpec& preamble,
                                 const SystemConfig& cfg);

}  // namespace uwofdm
