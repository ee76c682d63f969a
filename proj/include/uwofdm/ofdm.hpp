// OFDM symbol assembly: zero-subcarrier insertion, transmit symbol
// construction with an additive unique word, and mean symbol energy.

#pragma once

#include "uwofdm/codegen.hpp"
#include "uwofdm/config.hpp"
#include "uwofdm/types.hpp"

namespace uwofdm {

/// Dense subcarrier selection matrix B (n x n_occupied): unit rows at the
/// occupied subcarriers, zero rows at zero_idx. B^T B = I.
CMat selection_matrix(const SystemConfig& cfg);

/// Scatter a downsized frequency vector (length n_d+n_r) into a full
/// length-n symbol, zero subcarriers cleared. Equivalent to B * v.
FreqSymbol embed_occupied(const SystemConfig& cfg, const CVec& v);

/// Gather the occupied entries of a full length-n vector. Equivalent to B^T v.
CVec extract_occupied(const SystemConfig& cfg, const CVec& x);

/// Full transmit symbol x' = F^{-1}(B G d + x_u~): codeword on the occupied
/// subcarriers plus the unique word added in time domain. The last n_u
/// samples equal uw whenever G satisfies the zero-UW constraint.
TimeSymbol assemble_tx(const GeneratorMatrix& g, const SystemConfig& cfg,
                       const CVec& data, const CVec& uw);

/// Frequency-domain unique word x_u~ = F [0; uw].
FreqSymbol uw_spectrum(const SystemConfig& cfg, const CVec& uw);

/// Mean transmit symbol energy (sigma_d^2 / n) tr(G^H G) + ||uw||^2.
double mean_symbol_energy(const GeneratorMatrix& g, const SystemConfig& cfg,
                          const CVec& uw);

/// Largest tail-sample magnitude relative to the RMS of the head samples;
/// the zero-UW constraint check used across the test suites.
double zero_uw_residual(const TimeSymbol& x, int n_u);

}  // namespace uwofdm
