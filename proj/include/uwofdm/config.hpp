// System configuration: OFDM dimensions, subcarrier layout, symbol variance.
//
// Config file format ("uwofdm system config v1"): one `key value...` pair per
// line, '#' starts a comment. Keys: n, n_u, sigma_d2, fs, zero_idx, red_idx
// (the last two take a space-separated index list). Defaults reproduce the
// 802.11a-derived layout (N=64, N_u=16, 52 occupied subcarriers).

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uwofdm/types.hpp"

namespace uwofdm {

struct SystemConfig {
  int n = 64;        // DFT length (samples)
  int n_u = 16;      // unique-word length (samples)
  double sigma_d2 = 1.0;  // QAM symbol variance
  double fs = 20e6;       // sample rate (Hz)
  std::vector<int> zero_idx;  // zero subcarriers, ascending
  std::vector<int> red_idx;   // redundant subcarriers, ascending

  // N_r = N_u by construction; red_idx only fixes the placement used by the
  // systematic code and the optimizer parametrization. It may be empty for
  // single-carrier layouts where no dedicated positions exist.
  int n_r() const { return n_u; }
  int n_d() const { return n - n_r() - static_cast<int>(zero_idx.size()); }
  int n_occupied() const { return n - static_cast<int>(zero_idx.size()); }

  /// Occupied subcarrier indices (all except zero_idx), ascending.
  std::vector<int> occupied_idx() const;
  /// Data subcarrier indices (occupied minus redundant), ascending.
  std::vector<int> data_idx() const;

  /// Permutation view of P from the codeword construction c = P [d; r]:
  /// entry k gives the source position in [d; r] feeding occupied slot k
  /// (values < n_d() address data symbols, the rest redundant ones).
  std::vector<int> codeword_source() const;

  /// Throws ConfigError when the index sets violate the layout invariants
  /// (n_d + n_r + #zero = n, n_r = n_u, disjointness, range).
  void validate() const;

  /// Default layout: N=64, N_u=16, zero subcarriers {0, 27..37}, redundant
  /// subcarriers {2,6,10,14,17,21,24,26,38,40,43,47,50,54,58,62}.
  static SystemConfig ieee80211a();

  /// Single-carrier layout: no zero subcarriers, no dedicated redundant set
  /// (n_r is carried explicitly so that n_d = n - n_r).
  static SystemConfig single_carrier(int n, int n_r);
};

bool operator==(const SystemConfig& a, const SystemConfig& b);

SystemConfig load_config(const std::string& path);
SystemConfig parse_config(std::istream& in);
void save_config(const SystemConfig& cfg, const std::string& path);

}  // namespace uwofdm
