#include "uwofdm/channel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "uwofdm/dft.hpp"
#include "uwofdm/ofdm.hpp"
#include "uwofdm/rng.hpp"

namespace uwofdm {

RVec exponential_profile(int n_taps, double fs, double delay_spread_ns) {
  if (n_taps <= 0) throw std::invalid_argument("exponential_profile: tap count must be positive");
  if (!(delay_spread_ns > 0.0))
    throw std::invalid_argument("exponential_profile: delay spread must be positive");
  const double ts_ns = 1e9 / fs;
  RVec p(n_taps);
  for (int k = 0; k < n_taps; ++k) p(k) = std::exp(-k * ts_ns / delay_spread_ns);
  return p / p.sum();
}

CVec draw_taps(std::mt19937_64& rng, const RVec& profile) {
  CVec h(profile.size());
  for (Eigen::Index k = 0; k < profile.size(); ++k)
    h(k) = std::sqrt(profile(k)) * randn_c(rng);
  return h;
}

ChannelRealization gen_multipath(uint64_t seed, double delay_spread_ns,
                                 const SystemConfig& cfg, int max_taps) {
  const int taps = max_taps < 0 ? cfg.n_u : max_taps;
  if (taps > cfg.n_u)
    throw std::invalid_argument("gen_multipath: impulse response longer than the guard interval");
  std::mt19937_64 rng(seed);
  const RVec profile = exponential_profile(taps, cfg.fs, delay_spread_ns);
  CVec h = draw_taps(rng, profile);
  h /= h.norm();  // receive power independent of the realization
  return ChannelRealization{h, to_freq(h, cfg)};
}

CVec to_freq(const CVec& h, const SystemConfig& cfg) {
  CVec padded = CVec::Zero(cfg.n);
  padded.head(h.size()) = h;
  return extract_occupied(cfg, dft(padded));
}

CVec awgn(std::mt19937_64& rng, int n, double sigma_n2) {
  CVec v(n);
  const double scale = std::sqrt(sigma_n2);
  for (int i = 0; i < n; ++i) v(i) = scale * randn_c(rng);
  return v;
}

TimeSymbol apply_channel(const TimeSymbol& x, const ChannelRealization& ch,
                         const NoiseSpec& noise, std::mt19937_64& rng, int n_u) {
  if (ch.h.size() > n_u)
    throw std::invalid_argument("apply_channel: impulse response exceeds the guard interval");
  const int n = static_cast<int>(x.size());
  TimeSymbol y = TimeSymbol::Zero(n);
  for (Eigen::Index k = 0; k < ch.h.size(); ++k) {
    const Complex hk = ch.h(k);
    if (hk == Complex{}) continue;
    for (int t = 0; t < n; ++t) y(t) += hk * x((t - static_cast<int>(k) + n) % n);
  }
  if (noise.sigma_n2 > 0.0) y += awgn(rng, n, noise.sigma_n2);
  return y;
}

ChannelCorpus generate_corpus(uint64_t seed, int count, double delay_spread_ns,
                              const SystemConfig& cfg) {
  ChannelCorpus corpus;
  corpus.seed = seed;
  corpus.delay_spread_ns = delay_spread_ns;
  corpus.fs = cfg.fs;
  corpus.n_u = cfg.n_u;
  corpus.taps.reserve(count);
  for (int i = 0; i < count; ++i) {
    const uint64_t s = derive_seed({seed, static_cast<uint64_t>(i)});
    corpus.taps.push_back(gen_multipath(s, delay_spread_ns, cfg).h);
  }
  return corpus;
}

void save_corpus(const ChannelCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write channel corpus file " + path);
  out << "# uwofdm channel corpus v1\n";
  out << std::setprecision(17);
  out << "count " << corpus.count() << "\n";
  out << "tau_rms_ns " << corpus.delay_spread_ns << "\n";
  out << "fs " << corpus.fs << "\n";
  out << "n_u " << corpus.n_u << "\n";
  out << "seed " << corpus.seed << "\n";
  out << "taps\n";
  for (const CVec& h : corpus.taps) {
    out << h.size();
    for (Eigen::Index k = 0; k < h.size(); ++k)
      out << ' ' << h(k).real() << ' ' << h(k).imag();
    out << '\n';
  }
  if (!out) throw ConfigError("write failure on channel corpus file " + path);
}

ChannelCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open channel corpus file " + path);
  ChannelCorpus corpus;
  int count = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "count") ls >> count;
    else if (key == "tau_rms_ns") ls >> corpus.delay_spread_ns;
    else if (key == "fs") ls >> corpus.fs;
    else if (key == "n_u") ls >> corpus.n_u;
    else if (key == "seed") ls >> corpus.seed;
    else if (key == "taps") break;
    else throw ConfigError("corpus file: unknown key '" + key + "'");
  }
  if (count < 0) throw ConfigError("corpus file: missing realization count");
  corpus.taps.reserve(count);
  for (int i = 0; i < count; ++i) {
    int len = 0;
    if (!(in >> len) || len <= 0) throw ConfigError("corpus file: truncated tap data");
    CVec h(len);
    for (int k = 0; k < len; ++k) {
      double re, im;
      if (!(in >> re >> im)) throw ConfigError("corpus file: truncated tap data");
      h(k) = Complex(re, im);
    }
    corpus.taps.push_back(std::move(h));
  }
  return corpus;
}

}  // namespace uwofdm
