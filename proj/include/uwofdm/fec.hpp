// Outer coding chain: K=7 convolutional encoder (133/171), WLAN-style
// puncturing to rate 3/4, per-OFDM-symbol block interleaving, Gray QAM
// mapping, max-log soft demapping weighted by per-subcarrier error
// variances, and soft-decision Viterbi decoding.

#pragma once

#include <cstdint>
#include <vector>

#include "uwofdm/types.hpp"

namespace uwofdm::fec {

enum class CodeRate { Half, ThreeQuarter };
enum class Constellation { Qpsk, Qam16 };

/// Constraint length 7, generators 133/171 (octal), zero-terminated blocks.
struct OuterCodeSpec {
  CodeRate rate = CodeRate::Half;
  static constexpr int kConstraintLength = 7;
  static constexpr unsigned kGenA = 0133;
  static constexpr unsigned kGenB = 0171;
  static constexpr int kTailBits = kConstraintLength - 1;
};

int bits_per_symbol(Constellation c);

/// Coded block length produced by encode() for n_info information bits
/// (tail bits included, puncturing applied).
int coded_length(int n_info, CodeRate rate);

/// Information bits that fit in a coded block of n_coded bits, tail included.
int info_length(int n_coded, CodeRate rate);

/// Convolutional encoding with zero termination and puncturing.
std::vector<uint8_t> encode(const std::vector<uint8_t>& bits, const OuterCodeSpec& spec);

/// Soft-decision Viterbi decoding over the full zero-terminated block.
/// LLR convention: llr = log P(bit=0) / P(bit=1); depunctured positions carry
/// llr 0. Returns the information bits (tail stripped).
std::vector<uint8_t> viterbi_decode(const std::vector<double>& llrs, const OuterCodeSpec& spec);

/// Gray QAM mapping at symbol variance sigma_d2.
std::vector<Complex> map_qam(const std::vector<uint8_t>& bits, Constellation scheme,
                             double sigma_d2 = 1.0);

/// Max-log LLRs for a block of symbol estimates; noise_vars[i] is the total
/// complex error variance of estimate i (from the equalizer's C_ee diagonal).
std::vector<double> soft_demap(const std::vector<Complex>& symbols,
                               const std::vector<double>& noise_vars,
                               Constellation scheme, double sigma_d2 = 1.0);

/// Block interleaver over one OFDM symbol's coded bits: row write / column
/// read with the given column count; columns = 1 is the identity. Block
/// length must be divisible by the column count.
struct Interleaver {
  int columns = 8;

  std::vector<uint8_t> interleave(const std::vector<uint8_t>& bits) const;
  std::vector<double> deinterleave(const std::vector<double>& llrs) const;
  std::vector<int> permutation(int n) const;  // output position -> input position
};

}  // namespace uwofdm::fec
