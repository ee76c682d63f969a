#include "uwofdm/fec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uwofdm::fec {

namespace {

// Shift-right window convention: bit 6 of the window holds the current input
// bit, so the tap masks equal the octal generator constants directly.
inline uint8_t parity7(unsigned w) { return static_cast<uint8_t>(std::popcount(w) & 1u); }

constexpr int kStates = 64;  // 2^(K-1)

// Rate-3/4 WLAN puncturing: of every six coded bits A1 B1 A2 B2 A3 B3 the
// bits B2 and A3 are stolen.
constexpr bool keep_a(int step_in_period) { return step_in_period != 2; }
constexpr bool keep_b(int step_in_period) { return step_in_period != 1; }

int period_steps(CodeRate rate) { return rate == CodeRate::Half ? 1 : 3; }

void check_step_count(int steps, CodeRate rate, const char* who) {
  if (rate == CodeRate::ThreeQuarter && steps % 3 != 0)
    throw std::invalid_argument(std::string(who) +
                                ": rate-3/4 blocks need a step count divisible by 3");
}

struct QamPoint {
  Complex value;
  unsigned label;
};

// Gray constellations at unit symbol energy; 16QAM maps (b0 b1) to the
// in-phase axis and (b2 b3) to the quadrature axis, 00 -> -3, 01 -> -1,
// 11 -> +1, 10 -> +3 (scaled by 1/sqrt(10)).
std::vector<QamPoint> constellation(Constellation scheme) {
  std::vector<QamPoint> pts;
  if (scheme == Constellation::Qpsk) {
    const double a = M_SQRT1_2;
    for (unsigned label = 0; label < 4; ++label) {
      const double re = (label & 2u) ? -a : a;   // b0 = 0 -> +
      const double im = (label & 1u) ? -a : a;   // b1 = 0 -> +
      pts.push_back({Complex(re, im), label});
    }
    return pts;
  }
  auto axis = [](unsigned b_sign, unsigned b_mag) {
    const double mag = b_mag ? 1.0 : 3.0;
    return (b_sign ? mag : -mag) / std::sqrt(10.0);
  };
  for (unsigned label = 0; label < 16; ++label) {
    const unsigned b0 = (label >> 3) & 1u, b1 = (label >> 2) & 1u;
    const unsigned b2 = (label >> 1) & 1u, b3 = label & 1u;
    pts.push_back({Complex(axis(b0, b1), axis(b2, b3)), label});
  }
  return pts;
}

}  // namespace

int bits_per_symbol(Constellation c) { return c == Constellation::Qpsk ? 2 : 4; }

int coded_length(int n_info, CodeRate rate) {
  const int steps = n_info + OuterCodeSpec::kTailBits;
  check_step_count(steps, rate, "coded_length");
  return rate == CodeRate::Half ? 2 * steps : 4 * steps / 3;
}

int info_length(int n_coded, CodeRate rate) {
  int steps;
  if (rate == CodeRate::Half) {
    if (n_coded % 2 != 0) throw std::invalid_argument("info_length: odd coded length");
    steps = n_coded / 2;
  } else {
    if (n_coded % 4 != 0) throw std::invalid_argument("info_length: coded length not divisible by 4");
    steps = 3 * n_coded / 4;
  }
  const int n_info = steps - OuterCodeSpec::kTailBits;
  if (n_info <= 0) throw std::invalid_argument("info_length: block too short");
  check_step_count(steps, rate, "info_length");
  return n_info;
}

std::vector<uint8_t> encode(const std::vector<uint8_t>& bits, const OuterCodeSpec& spec) {
  const int steps = static_cast<int>(bits.size()) + OuterCodeSpec::kTailBits;
  check_step_count(steps, spec.rate, "encode");
  std::vector<uint8_t> out;
  out.reserve(coded_length(static_cast<int>(bits.size()), spec.rate));
  unsigned w = 0;
  const int period = period_steps(spec.rate);
  for (int t = 0; t < steps; ++t) {
    const unsigned b = t < static_cast<int>(bits.size()) ? (bits[t] & 1u) : 0u;
    w = (w >> 1) | (b << 6);
    const uint8_t a = parity7(w & OuterCodeSpec::kGenA);
    const uint8_t bb = parity7(w & OuterCodeSpec::kGenB);
    const int p = t % period;
    if (spec.rate == CodeRate::Half) {
      out.push_back(a);
      out.push_back(bb);
    } else {
      if (keep_a(p)) out.push_back(a);
      if (keep_b(p)) out.push_back(bb);
    }
  }
  return out;
}

std::vector<uint8_t> viterbi_decode(const std::vector<double>& llrs, const OuterCodeSpec& spec) {
  // Depuncture into per-step (La, Lb) with zeros at stolen positions.
  int steps;
  if (spec.rate == CodeRate::Half) {
    if (llrs.size() % 2 != 0) throw std::invalid_argument("viterbi_decode: odd LLR count");
    steps = static_cast<int>(llrs.size()) / 2;
  } else {
    if (llrs.size() % 4 != 0)
      throw std::invalid_argument("viterbi_decode: LLR count not divisible by 4");
    steps = 3 * static_cast<int>(llrs.size()) / 4;
  }
  check_step_count(steps, spec.rate, "viterbi_decode");
  std::vector<double> la(steps, 0.0), lb(steps, 0.0);
  {
    size_t pos = 0;
    const int period = period_steps(spec.rate);
    for (int t = 0; t < steps; ++t) {
      const int p = t % period;
      if (spec.rate == CodeRate::Half || keep_a(p)) la[t] = llrs[pos++];
      if (spec.rate == CodeRate::Half || keep_b(p)) lb[t] = llrs[pos++];
    }
  }

  // Precomputed branch outputs: window w = state | (input << 6).
  std::array<uint8_t, kStates * 2> out_a{}, out_b{};
  for (int s = 0; s < kStates; ++s)
    for (unsigned b = 0; b < 2; ++b) {
      const unsigned w = static_cast<unsigned>(s) | (b << 6);
      out_a[s * 2 + b] = parity7(w & OuterCodeSpec::kGenA);
      out_b[s * 2 + b] = parity7(w & OuterCodeSpec::kGenB);
    }

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> metric(kStates, kNegInf), next(kStates, kNegInf);
  metric[0] = 0.0;  // encoder starts in the all-zero state
  std::vector<uint8_t> decision(static_cast<size_t>(steps) * kStates);

  for (int t = 0; t < steps; ++t) {
    std::fill(next.begin(), next.end(), kNegInf);
    uint8_t* dec = decision.data() + static_cast<size_t>(t) * kStates;
    for (int s = 0; s < kStates; ++s) {
      const double m = metric[s];
      if (m == kNegInf) continue;
      for (unsigned b = 0; b < 2; ++b) {
        const unsigned w = static_cast<unsigned>(s) | (b << 6);
        const int ns = static_cast<int>(w >> 1);
        // Correlation metric: positive LLR favors coded bit 0.
        const double bm = (out_a[s * 2 + b] ? -la[t] : la[t]) +
                          (out_b[s * 2 + b] ? -lb[t] : lb[t]);
        const double cand = m + bm;
        if (cand > next[ns]) {
          next[ns] = cand;
          dec[ns] = static_cast<uint8_t>((s << 1) | b);  // predecessor state and input
        }
      }
    }
    metric.swap(next);
  }

  // Zero termination: trace back from state 0.
  std::vector<uint8_t> bits(steps);
  int state = 0;
  for (int t = steps - 1; t >= 0; --t) {
    const uint8_t d = decision[static_cast<size_t>(t) * kStates + state];
    bits[t] = d & 1u;
    state = d >> 1;
  }
  bits.resize(steps - OuterCodeSpec::kTailBits);
  return bits;
}

std::vector<Complex> map_qam(const std::vector<uint8_t>& bits, Constellation scheme,
                             double sigma_d2) {
  const int bps = bits_per_symbol(scheme);
  if (bits.size() % bps != 0)
    throw std::invalid_argument("map_qam: bit count not a multiple of the symbol capacity");
  const auto pts = constellation(scheme);
  const double scale = std::sqrt(sigma_d2);
  std::vector<Complex> out;
  out.reserve(bits.size() / bps);
  for (size_t i = 0; i < bits.size(); i += bps) {
    unsigned label = 0;
    for (int b = 0; b < bps; ++b) label = (label << 1) | (bits[i + b] & 1u);
    out.push_back(scale * pts[label].value);
  }
  return out;
}

std::vector<double> soft_demap(const std::vector<Complex>& symbols,
                               const std::vector<double>& noise_vars, Constellation scheme,
                               double sigma_d2) {
  if (symbols.size() != noise_vars.size())
    throw std::invalid_argument("soft_demap: one noise variance per symbol required");
  const int bps = bits_per_symbol(scheme);
  const auto pts = constellation(scheme);
  const double scale = std::sqrt(sigma_d2);
  std::vector<double> llrs;
  llrs.reserve(symbols.size() * bps);
  for (size_t i = 0; i < symbols.size(); ++i) {
    const double var = noise_vars[i];
    if (!(var > 0.0)) throw std::invalid_argument("soft_demap: nonpositive noise variance");
    for (int b = bps - 1; b >= 0; --b) {
      double min0 = std::numeric_limits<double>::infinity();
      double min1 = min0;
      for (const auto& p : pts) {
        const double d2 = std::norm(symbols[i] - scale * p.value);
        if ((p.label >> b) & 1u) min1 = std::min(min1, d2);
        else min0 = std::min(min0, d2);
      }
      llrs.push_back((min1 - min0) / var);
    }
  }
  return llrs;
}

std::vector<int> Interleaver::permutation(int n) const {
  if (columns <= 0) throw std::invalid_argument("interleaver: column count must be positive");
  if (n % columns != 0)
    throw std::invalid_argument("interleaver: block length not divisible by the column count");
  const int rows = n / columns;
  std::vector<int> perm(n);
  for (int j = 0; j < n; ++j) {
    const int col = j / rows;
    const int row = j % rows;
    perm[j] = row * columns + col;
  }
  return perm;
}

std::vector<uint8_t> Interleaver::interleave(const std::vector<uint8_t>& bits) const {
  const auto perm = permutation(static_cast<int>(bits.size()));
  std::vector<uint8_t> out(bits.size());
  for (size_t j = 0; j < bits.size(); ++j) out[j] = bits[perm[j]];
  return out;
}

std::vector<double> Interleaver::deinterleave(const std::vector<double>& llrs) const {
  const auto perm = permutation(static_cast<int>(llrs.size()));
  std::vector<double> out(llrs.size());
  for (size_t j = 0; j < llrs.size(); ++j) out[perm[j]] = llrs[j];
  return out;
}

}  // namespace uwofdm::fec
