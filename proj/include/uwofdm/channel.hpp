// Frequency-selective indoor channel model: exponentially decaying tapped
// delay line with Rayleigh taps, cyclic channel application, AWGN injection,
// and the persisted channel corpus shared by all BER comparisons.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uwofdm/config.hpp"
#include "uwofdm/types.hpp"

namespace uwofdm {

/// One multipath realization: sample-spaced impulse response (||h|| = 1)
/// plus its downsized frequency response on the occupied subcarriers.
struct ChannelRealization {
  CVec h;   // taps, length <= n_u
  CVec hd;  // diagonal of H~, length n_d + n_r
};

struct NoiseSpec {
  double sigma_n2 = 0.0;  // per-sample time-domain noise variance
};

/// Expected tap powers exp(-k Ts / tau_rms), truncated at n_taps and
/// normalized to unit sum.
RVec exponential_profile(int n_taps, double fs, double delay_spread_ns);

/// Draw circularly-symmetric Gaussian taps with the given power profile
/// (no per-realization normalization).
CVec draw_taps(std::mt19937_64& rng, const RVec& profile);

/// Full channel draw: profile -> taps -> unit-norm normalization -> downsized
/// frequency response for cfg.
ChannelRealization gen_multipath(uint64_t seed, double delay_spread_ns,
                                 const SystemConfig& cfg,
                                 int max_taps = -1 /* default n_u */);

/// y = h (*) x (cyclic) + n, n ~ CN(0, sigma_n2 I). Throws
/// std::invalid_argument when the tap count exceeds n_u.
TimeSymbol apply_channel(const TimeSymbol& x, const ChannelRealization& ch,
                         const NoiseSpec& noise, std::mt19937_64& rng,
                         int n_u);

/// Downsized diagonal frequency response of a tap vector for cfg.
CVec to_freq(const CVec& h, const SystemConfig& cfg);

/// Complex AWGN vector, total per-sample variance sigma_n2.
CVec awgn(std::mt19937_64& rng, int n, double sigma_n2);

// --- Corpus -----------------------------------------------------------------

/// Write-once channel corpus: every system variant is simulated against the
/// same stored realizations.
struct ChannelCorpus {
  uint64_t seed = 0;
  double delay_spread_ns = 100.0;
  double fs = 20e6;
  int n_u = 16;
  std::vector<CVec> taps;  // per-realization impulse responses

  int count() const { return static_cast<int>(taps.size()); }
};

ChannelCorpus generate_corpus(uint64_t seed, int count, double delay_spread_ns,
                              const SystemConfig& cfg);

/// Text format "uwofdm channel corpus v1": header (count, tau_rms, fs, n_u,
/// seed) followed by one tap list per realization; reloads bit-exactly.
void save_corpus(const ChannelCorpus& corpus, const std::string& path);
ChannelCorpus load_corpus(const std::string& path);

}  // namespace uwofdm
