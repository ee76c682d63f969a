#include "uwofdm/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "uwofdm/dft.hpp"
#include "uwofdm/ofdm.hpp"
#include "uwofdm/rng.hpp"

namespace uwofdm::sim {

namespace {

std::vector<int> occupied_of(int n, const std::vector<int>& zero_idx) {
  std::unordered_set<int> zeros(zero_idx.begin(), zero_idx.end());
  std::vector<int> occ;
  for (int k = 0; k < n; ++k)
    if (!zeros.count(k)) occ.push_back(k);
  return occ;
}

}  // namespace

// --- CP-OFDM configuration ---------------------------------------------------

std::vector<int> CpOfdmConfig::data_idx() const {
  std::unordered_set<int> pilots(pilot_idx.begin(), pilot_idx.end());
  std::vector<int> data;
  for (int k : occupied_of(n, zero_idx))
    if (!pilots.count(k)) data.push_back(k);
  return data;
}

void CpOfdmConfig::validate() const {
  auto bad = [](const std::string& m) { throw ConfigError("cp-ofdm config: " + m); };
  if (n <= 0 || cp_len <= 0 || cp_len >= n) bad("bad symbol dimensions");
  if (sigma_d2 <= 0.0 || fs <= 0.0) bad("bad signal parameters");
  std::unordered_set<int> zeros(zero_idx.begin(), zero_idx.end());
  for (int k : pilot_idx) {
    if (k < 0 || k >= n) bad("pilot index out of range");
    if (zeros.count(k)) bad("pilot collides with a zero subcarrier");
  }
  if (data_sc() <= 0) bad("no data subcarriers");
}

CpOfdmConfig CpOfdmConfig::ieee80211a() {
  CpOfdmConfig cfg;
  cfg.n = 64;
  cfg.cp_len = 16;
  cfg.zero_idx = {0, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37};
  cfg.pilot_idx = {7, 21, 43, 57};  // +-7, +-21
  cfg.validate();
  return cfg;
}

std::string to_string(RxEstimator e) {
  switch (e) {
    case RxEstimator::Blue: return "blue";
    case RxEstimator::Lmmse: return "lmmse";
    case RxEstimator::Ci: return "ci";
  }
  return "?";
}

std::string to_string(OuterRate r) {
  switch (r) {
    case OuterRate::None: return "none";
    case OuterRate::Half: return "1/2";
    case OuterRate::ThreeQuarter: return "3/4";
  }
  return "?";
}

std::string to_string(fec::Constellation c) {
  return c == fec::Constellation::Qpsk ? "qpsk" : "16qam";
}

// --- Energy bookkeeping ------------------------------------------------------

CVec chirp_uw(int n_u, double energy) {
  CVec uw(n_u);
  const double amp = std::sqrt(energy / n_u);
  for (int k = 0; k < n_u; ++k)
    uw(k) = std::polar(amp, std::numbers::pi * static_cast<double>(k) * k / n_u);
  return uw;
}

double uw_energy(const GeneratorMatrix& g, const SystemConfig& cfg) {
  // E_u / E_total = 4/52 (the pilot energy share of the reference system)
  // and E_total = E_data + E_u give E_u = E_data / 12.
  const double e_data = cfg.sigma_d2 / cfg.n * g.mat.squaredNorm();
  return e_data / 12.0;
}

int payload_symbols(const Scenario& sc) {
  return sc.is_cp ? sc.cp_cfg.data_sc() : sc.cfg.n_d();
}

double mean_tx_energy(const Scenario& sc) {
  if (sc.is_cp) {
    const auto& c = sc.cp_cfg;
    const double loaded = static_cast<double>(c.data_sc() + c.cp_pilots());
    const double body = loaded * c.sigma_d2 / c.n;
    return body * (c.n + c.cp_len) / c.n;  // prefix repeats the tail samples
  }
  const double e_data = sc.cfg.sigma_d2 / sc.cfg.n * sc.gen.mat.squaredNorm();
  return e_data + (sc.uw_shape == UwShape::Chirp ? uw_energy(sc.gen, sc.cfg) : 0.0);
}

double es_per_payload_symbol(const Scenario& sc) {
  return mean_tx_energy(sc) / payload_symbols(sc);
}

// --- CP-OFDM chain -----------------------------------------------------------

TimeSymbol cp_ofdm_body(const CpOfdmConfig& cfg, const std::vector<Complex>& data) {
  const auto didx = cfg.data_idx();
  if (data.size() != didx.size())
    throw std::invalid_argument("cp_ofdm_body: wrong data symbol count");
  CVec x = CVec::Zero(cfg.n);
  for (size_t i = 0; i < didx.size(); ++i) x(didx[i]) = data[i];
  // Fixed pilot polarities at data-symbol energy.
  static constexpr double kPolarity[4] = {1.0, 1.0, 1.0, -1.0};
  const double amp = std::sqrt(cfg.sigma_d2);
  for (size_t i = 0; i < cfg.pilot_idx.size(); ++i)
    x(cfg.pilot_idx[i]) = amp * kPolarity[i % 4];
  return idft(x);
}

void cp_ofdm_rx(const CpOfdmConfig& cfg, const TimeSymbol& y_body, const CVec& h_occupied,
                double n_sigma_n2, std::vector<Complex>& data_out,
                std::vector<double>& var_out) {
  if (y_body.size() != cfg.n) throw std::invalid_argument("cp_ofdm_rx: wrong body length");
  const auto occ = occupied_of(cfg.n, cfg.zero_idx);
  if (h_occupied.size() != static_cast<Eigen::Index>(occ.size()))
    throw std::invalid_argument("cp_ofdm_rx: wrong channel vector length");
  const CVec y_f = dft(y_body);
  std::unordered_set<int> pilots(cfg.pilot_idx.begin(), cfg.pilot_idx.end());
  data_out.clear();
  var_out.clear();
  for (size_t i = 0; i < occ.size(); ++i) {
    if (pilots.count(occ[i])) continue;
    const Complex h = h_occupied(static_cast<Eigen::Index>(i));
    const double h2 = std::norm(h);
    if (h2 == 0.0) {
      // Dead subcarrier: no information; report a huge variance instead of
      // dividing by zero so the soft demapper erases these bits.
      data_out.push_back(Complex{0.0, 0.0});
      var_out.push_back(1e30);
      continue;
    }
    data_out.push_back(y_f(occ[i]) / h);
    var_out.push_back(n_sigma_n2 / h2);
  }
}

// --- Scenario description ----------------------------------------------------

std::string Scenario::canonical() const {
  std::ostringstream s;
  s << "system=" << system_id << ";cp=" << is_cp << ";est=" << to_string(estimator)
    << ";rate=" << to_string(rate) << ";mod=" << to_string(constellation)
    << ";uw=" << (uw_shape == UwShape::Chirp ? "chirp" : "zero")
    << ";corpus=" << corpus_id << ";sub=" << sub_corpus
    << ";csi=" << (csi == CsiMode::Perfect ? "perfect" : "estimated")
    << ";min_err=" << min_errors << ";max_bits=" << max_bits
    << ";frame_syms=" << frame_ofdm_symbols << ";seed=" << seed
    << ";kind=" << (is_cp ? std::string("-") : to_string(gen.kind))
    << ";n=" << (is_cp ? cp_cfg.n : cfg.n);
  return s.str();
}

std::string Scenario::fingerprint() const {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical());
  return s.str();
}

// --- BER Monte Carlo ---------------------------------------------------------

namespace {

struct FrameLayout {
  int n_cbps = 0;        // coded bits per OFDM symbol
  int capacity = 0;      // coded bits per frame
  int payload_bits = 0;  // information bits per frame (tail excluded)
};

FrameLayout frame_layout(const Scenario& sc) {
  FrameLayout fl;
  fl.n_cbps = payload_symbols(sc) * fec::bits_per_symbol(sc.constellation);
  fl.capacity = fl.n_cbps * sc.frame_ofdm_symbols;
  switch (sc.rate) {
    case OuterRate::None: fl.payload_bits = fl.capacity; break;
    case OuterRate::Half: fl.payload_bits = fec::info_length(fl.capacity, fec::CodeRate::Half); break;
    case OuterRate::ThreeQuarter:
      fl.payload_bits = fec::info_length(fl.capacity, fec::CodeRate::ThreeQuarter);
      break;
  }
  return fl;
}

void validate_scenario(const Scenario& sc) {
  if (sc.is_cp) {
    sc.cp_cfg.validate();
  } else {
    sc.cfg.validate();
    check_compatible(sc.gen, sc.cfg);
    if (sc.estimator == RxEstimator::Ci && sc.gen.kind != GenKind::Systematic)
      throw ConfigError("scenario: the CI receiver requires the systematic generator matrix");
  }
  if (sc.corpus_id != "awgn" && sc.corpus == nullptr)
    throw ConfigError("scenario: corpus '" + sc.corpus_id + "' is not attached");
  if (sc.corpus && sc.sub_corpus > sc.corpus->count())
    throw ConfigError("scenario: sub-corpus larger than the corpus");
  if (sc.es_n0_db.empty()) throw ConfigError("scenario: empty Es/N0 grid");
  frame_layout(sc);  // throws on inconsistent frame dimensioning
}

// Per-realization receiver state for one Es/N0 point.
struct RxState {
  ChannelRealization ch;   // applied channel (unit tap for AWGN)
  CVec h_used;             // CSI the receiver works with (downsized)
  Equalizer eq;            // UW systems
  CVec uw_influence;       // H_used .* xu_d
  bool usable = true;
};

std::vector<uint8_t> random_bits(std::mt19937_64& rng, int count) {
  std::vector<uint8_t> bits(count);
  for (int i = 0; i < count; ++i) bits[i] = static_cast<uint8_t>(rng() & 1u);
  return bits;
}

}  // namespace

std::vector<BerRecord> run_ber(const Scenario& sc) {
  validate_scenario(sc);
  const FrameLayout fl = frame_layout(sc);
  const double es = es_per_payload_symbol(sc);
  const double sigma_d2 = sc.is_cp ? sc.cp_cfg.sigma_d2 : sc.cfg.sigma_d2;
  const int n = sc.is_cp ? sc.cp_cfg.n : sc.cfg.n;
  const int n_u = sc.is_cp ? sc.cp_cfg.cp_len : sc.cfg.n_u;
  const uint64_t corpus_hash = fnv1a(sc.corpus_id);
  const fec::Interleaver il;  // 8-column block interleaver
  const std::string fp = sc.fingerprint();

  // UW waveform and its downsized spectrum.
  CVec uw = CVec::Zero(sc.is_cp ? 0 : sc.cfg.n_u);
  CVec xu_d;
  if (!sc.is_cp) {
    if (sc.uw_shape == UwShape::Chirp) uw = chirp_uw(sc.cfg.n_u, uw_energy(sc.gen, sc.cfg));
    xu_d = extract_occupied(sc.cfg, uw_spectrum(sc.cfg, uw));
  }

  // Channel set: identity tap for AWGN, the leading sub-corpus otherwise.
  std::vector<const CVec*> taps;
  CVec unit_tap = CVec::Ones(1);
  if (sc.corpus) {
    const int count = sc.sub_corpus > 0 ? sc.sub_corpus : sc.corpus->count();
    for (int i = 0; i < count; ++i) taps.push_back(&sc.corpus->taps[i]);
  } else {
    taps.push_back(&unit_tap);
  }

  const SystemConfig est_cfg = [&] {
    // Channel estimation works on the occupied-subcarrier layout, which the
    // CP system shares with the UW one.
    SystemConfig c = sc.cfg;
    if (sc.is_cp) {
      c.n = sc.cp_cfg.n;
      c.n_u = sc.cp_cfg.cp_len;
      c.zero_idx = sc.cp_cfg.zero_idx;
      c.red_idx.clear();
      c.sigma_d2 = sc.cp_cfg.sigma_d2;
      c.fs = sc.cp_cfg.fs;
    }
    return c;
  }();
  const PreambleSpec preamble =
      sc.csi == CsiMode::Estimated ? PreambleSpec::make(est_cfg) : PreambleSpec{};

  std::vector<BerRecord> records;
  for (size_t point = 0; point < sc.es_n0_db.size(); ++point) {
    const double esn0 = sc.es_n0_db[point];
    const double sigma_n2 = es / std::pow(10.0, esn0 / 10.0);
    const double n_sigma_n2 = n * sigma_n2;

    // Receiver state per realization.
    std::vector<RxState> states(taps.size());
    for (size_t r = 0; r < taps.size(); ++r) {
      RxState& st = states[r];
      st.ch.h = *taps[r];
      st.ch.hd = to_freq(st.ch.h, est_cfg);
      if (sc.csi == CsiMode::Perfect) {
        st.h_used = st.ch.hd;
      } else {
        std::mt19937_64 prng(derive_seed({sc.seed, corpus_hash, 0x70ADu, point, r}));
        const NoiseSpec ns{sigma_n2};
        const TimeSymbol y1 = apply_channel(preamble.x_time, st.ch, ns, prng, n_u);
        const TimeSymbol y2 = apply_channel(preamble.x_time, st.ch, ns, prng, n_u);
        st.h_used = estimate_channel(y1, y2, preamble, est_cfg).h_hat_diag;
      }
      if (!sc.is_cp) {
        try {
          switch (sc.estimator) {
            case RxEstimator::Blue:
              st.eq = blue_equalizer(sc.gen, st.h_used, n_sigma_n2);
              break;
            case RxEstimator::Lmmse:
              st.eq = lmmse_equalizer(sc.gen, st.h_used, n_sigma_n2, sigma_d2);
              break;
            case RxEstimator::Ci:
              st.eq = ci_equalizer(sc.cfg, st.h_used, n_sigma_n2);
              break;
          }
        } catch (const SingularChannelError&) {
          st.usable = false;  // pathological deep-null channel, skipped
        }
        st.uw_influence = st.h_used.cwiseProduct(xu_d);
      }
    }

    BerRecord rec;
    rec.system_id = sc.system_id;
    rec.estimator = sc.is_cp ? "one-tap" : to_string(sc.estimator);
    rec.outer_rate = to_string(sc.rate);
    rec.constellation = to_string(sc.constellation);
    rec.es_n0_db = esn0;
    rec.corpus_id = sc.corpus_id;
    rec.seed = sc.seed;
    rec.fingerprint = fp;

    for (uint64_t frame = 0; rec.bit_errors < sc.min_errors && rec.bits_sent < sc.max_bits;
         ++frame) {
      const RxState& st = states[frame % states.size()];
      if (!st.usable) continue;
      std::mt19937_64 rng(derive_seed({sc.seed, corpus_hash, point, frame}));

      const std::vector<uint8_t> payload = random_bits(rng, fl.payload_bits);
      std::vector<uint8_t> coded;
      switch (sc.rate) {
        case OuterRate::None: coded = payload; break;
        case OuterRate::Half: coded = fec::encode(payload, {fec::CodeRate::Half}); break;
        case OuterRate::ThreeQuarter:
          coded = fec::encode(payload, {fec::CodeRate::ThreeQuarter});
          break;
      }

      std::vector<double> llrs;
      llrs.reserve(fl.capacity);
      const NoiseSpec ns{sigma_n2};
      for (int s = 0; s < sc.frame_ofdm_symbols; ++s) {
        std::vector<uint8_t> block(coded.begin() + static_cast<long>(s) * fl.n_cbps,
                                   coded.begin() + static_cast<long>(s + 1) * fl.n_cbps);
        const auto symbols = fec::map_qam(il.interleave(block), sc.constellation, sigma_d2);

        std::vector<Complex> est;
        std::vector<double> vars;
        if (sc.is_cp) {
          const TimeSymbol body = cp_ofdm_body(sc.cp_cfg, symbols);
          const TimeSymbol y = apply_channel(body, st.ch, ns, rng, n_u);
          cp_ofdm_rx(sc.cp_cfg, y, st.h_used, n_sigma_n2, est, vars);
        } else {
          CVec d(sc.cfg.n_d());
          for (int i = 0; i < sc.cfg.n_d(); ++i) d(i) = symbols[i];
          const TimeSymbol x = assemble_tx(sc.gen, sc.cfg, d, uw);
          const TimeSymbol y = apply_channel(x, st.ch, ns, rng, n_u);
          const CVec yd = extract_occupied(sc.cfg, dft(y));
          const CVec y_corr = yd - st.uw_influence;
          const CVec d_hat = st.eq.e * y_corr;
          est.assign(d_hat.data(), d_hat.data() + d_hat.size());
          vars.assign(st.eq.cee_diag.data(), st.eq.cee_diag.data() + st.eq.cee_diag.size());
        }
        const auto block_llrs = il.deinterleave(fec::soft_demap(est, vars, sc.constellation, sigma_d2));
        llrs.insert(llrs.end(), block_llrs.begin(), block_llrs.end());
      }

      std::vector<uint8_t> decoded;
      if (sc.rate == OuterRate::None) {
        decoded.resize(llrs.size());
        for (size_t i = 0; i < llrs.size(); ++i) decoded[i] = llrs[i] < 0.0 ? 1 : 0;
      } else {
        decoded = fec::viterbi_decode(
            llrs, {sc.rate == OuterRate::Half ? fec::CodeRate::Half : fec::CodeRate::ThreeQuarter});
      }

      long long errors = 0;
      for (int i = 0; i < fl.payload_bits; ++i) errors += (decoded[i] != payload[i]);
      rec.bit_errors += errors;
      rec.bits_sent += fl.payload_bits;
    }
    rec.hit_min_errors = rec.bit_errors >= sc.min_errors;
    records.push_back(std::move(rec));
  }
  return records;
}

// --- PSD -----------------------------------------------------------------

PsdCurve run_psd(const PsdRequest& req) {
  if (req.n_symbols < 1) throw std::invalid_argument("run_psd: need at least one symbol");
  std::mt19937_64 rng(req.seed);
  std::vector<Complex> burst;

  if (req.is_cp) {
    req.cp_cfg.validate();
    const int nd = req.cp_cfg.data_sc();
    burst.reserve(static_cast<size_t>(req.n_symbols) * (req.cp_cfg.n + req.cp_cfg.cp_len));
    for (int s = 0; s < req.n_symbols; ++s) {
      const auto bits = random_bits(rng, 2 * nd);
      const auto data = fec::map_qam(bits, fec::Constellation::Qpsk, req.cp_cfg.sigma_d2);
      const TimeSymbol body = cp_ofdm_body(req.cp_cfg, data);
      for (int k = req.cp_cfg.n - req.cp_cfg.cp_len; k < req.cp_cfg.n; ++k)
        burst.push_back(body(k));  // cyclic prefix
      burst.insert(burst.end(), body.data(), body.data() + body.size());
    }
  } else {
    if (req.gen == nullptr) throw std::invalid_argument("run_psd: generator matrix required");
    check_compatible(*req.gen, req.cfg);
    CVec uw = CVec::Zero(req.cfg.n_u);
    if (req.uw_shape == UwShape::Chirp) uw = chirp_uw(req.cfg.n_u, uw_energy(*req.gen, req.cfg));
    burst.reserve(static_cast<size_t>(req.n_symbols) * req.cfg.n);
    for (int s = 0; s < req.n_symbols; ++s) {
      const auto bits = random_bits(rng, 2 * req.cfg.n_d());
      const auto syms = fec::map_qam(bits, fec::Constellation::Qpsk, req.cfg.sigma_d2);
      CVec d(req.cfg.n_d());
      for (int i = 0; i < req.cfg.n_d(); ++i) d(i) = syms[i];
      const TimeSymbol x = assemble_tx(*req.gen, req.cfg, d, uw);
      burst.insert(burst.end(), x.data(), x.data() + x.size());
    }
  }

  // Welch: Hann window, half-overlapping segments.
  const int seg = req.segment;
  if (static_cast<int>(burst.size()) < seg)
    throw std::invalid_argument("run_psd: burst shorter than one Welch segment");
  RVec window(seg);
  for (int i = 0; i < seg; ++i)
    window(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / seg));
  RVec accum = RVec::Zero(seg);
  int n_segments = 0;
  for (size_t start = 0; start + seg <= burst.size(); start += seg / 2) {
    CVec piece(seg);
    for (int i = 0; i < seg; ++i) piece(i) = window(i) * burst[start + i];
    const CVec spec = dft(piece);
    accum += spec.cwiseAbs2();
    ++n_segments;
  }
  accum /= n_segments;

  const double fs = req.is_cp ? req.cp_cfg.fs : req.cfg.fs;
  PsdCurve curve;
  curve.freq_hz.resize(seg);
  curve.psd_db.resize(seg);
  // In-band edge from the occupied-subcarrier layout.
  const int n = req.is_cp ? req.cp_cfg.n : req.cfg.n;
  const auto occ = occupied_of(n, req.is_cp ? req.cp_cfg.zero_idx : req.cfg.zero_idx);
  double f_inband = 0.0;
  for (int k : occ) {
    const double f = (k <= n / 2 ? k : k - n) * fs / n;
    f_inband = std::max(f_inband, std::abs(f));
  }
  double peak = 0.0;
  RVec shifted(seg);
  for (int i = 0; i < seg; ++i) {
    const int src = (i + seg / 2) % seg;
    shifted(i) = accum(src);
    curve.freq_hz(i) = (i - seg / 2) * fs / seg;
    if (std::abs(curve.freq_hz(i)) <= f_inband) peak = std::max(peak, shifted(i));
  }
  for (int i = 0; i < seg; ++i)
    curve.psd_db(i) = 10.0 * std::log10(std::max(shifted(i), 1e-300) / peak);
  return curve;
}

double band_mean_db(const PsdCurve& curve, double f_lo, double f_hi) {
  double acc = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < curve.freq_hz.size(); ++i) {
    const double f = std::abs(curve.freq_hz(i));
    if (f >= f_lo && f <= f_hi) {
      acc += std::pow(10.0, curve.psd_db(i) / 10.0);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("band_mean_db: empty band");
  return 10.0 * std::log10(acc / count);
}

double band_ripple_db(const PsdCurve& curve, double f_hi) {
  double lo = 1e300, hi = -1e300;
  for (Eigen::Index i = 0; i < curve.freq_hz.size(); ++i) {
    if (std::abs(curve.freq_hz(i)) <= f_hi) {
      lo = std::min(lo, curve.psd_db(i));
      hi = std::max(hi, curve.psd_db(i));
    }
  }
  if (hi < lo) throw std::invalid_argument("band_ripple_db: empty band");
  return hi - lo;
}

// --- Results persistence -------------------------------------------------

namespace {
constexpr const char* kResultsHeader =
    "# uwofdm ber results v1\n"
    "# fingerprint\tsystem_id\testimator\touter_rate\tconstellation\tes_n0_db\t"
    "bits_sent\tbit_errors\tcorpus_id\tseed\thit_min_errors\n";
}

void export_results(const std::vector<BerRecord>& records, const std::string& path) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError("cannot open results file " + path);
  if (fresh) out << kResultsHeader;
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.fingerprint << '\t' << r.system_id << '\t' << r.estimator << '\t' << r.outer_rate
        << '\t' << r.constellation << '\t' << r.es_n0_db << '\t' << r.bits_sent << '\t'
        << r.bit_errors << '\t' << r.corpus_id << '\t' << r.seed << '\t'
        << (r.hit_min_errors ? 1 : 0) << '\n';
  }
  if (!out) throw ConfigError("write failure on results file " + path);
}

std::vector<BerRecord> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open results file " + path);
  std::vector<BerRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    BerRecord r;
    int flag = 0;
    if (!(ls >> r.fingerprint >> r.system_id >> r.estimator >> r.outer_rate >> r.constellation >>
          r.es_n0_db >> r.bits_sent >> r.bit_errors >> r.corpus_id >> r.seed >> flag))
      throw ConfigError("results file: malformed row");
    r.hit_min_errors = flag != 0;
    records.push_back(std::move(r));
  }
  return records;
}

void write_curve_files(const std::vector<BerRecord>& records, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<const BerRecord*>> groups;
  for (const auto& r : records) groups[r.fingerprint].push_back(&r);
  for (auto& [fp, rows] : groups) {
    std::sort(rows.begin(), rows.end(),
              [](const BerRecord* a, const BerRecord* b) { return a->es_n0_db < b->es_n0_db; });
    const std::string path = dir + "/" + rows.front()->system_id + "_" + fp + ".dat";
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write curve file " + path);
    out << "# es_n0_db\tber\tbits_sent\tbit_errors\n" << std::setprecision(10);
    for (const auto* r : rows)
      out << r->es_n0_db << '\t' << r->ber() << '\t' << r->bits_sent << '\t' << r->bit_errors
          << '\n';
  }
}

// --- Scenario file -------------------------------------------------------

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  ScenarioFile sf;
  Scenario& sc = sf.scenario;
  std::string line;
  std::string channel = "awgn";
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string v;
    if (key == "system") { ls >> v; sc.is_cp = (v == "cp-ofdm"); }
    else if (key == "system_id") ls >> sc.system_id;
    else if (key == "matrix") { ls >> v; sc.gen = load_generator(v); }
    else if (key == "config") { ls >> v; sc.cfg = load_config(v); }
    else if (key == "estimator") {
      ls >> v;
      if (v == "blue") sc.estimator = RxEstimator::Blue;
      else if (v == "lmmse") sc.estimator = RxEstimator::Lmmse;
      else if (v == "ci") sc.estimator = RxEstimator::Ci;
      else throw ConfigError("scenario: unknown estimator '" + v + "'");
    } else if (key == "rate") {
      ls >> v;
      if (v == "none") sc.rate = OuterRate::None;
      else if (v == "1/2") sc.rate = OuterRate::Half;
      else if (v == "3/4") sc.rate = OuterRate::ThreeQuarter;
      else throw ConfigError("scenario: unknown rate '" + v + "'");
    } else if (key == "constellation") {
      ls >> v;
      if (v == "qpsk") sc.constellation = fec::Constellation::Qpsk;
      else if (v == "16qam") sc.constellation = fec::Constellation::Qam16;
      else throw ConfigError("scenario: unknown constellation '" + v + "'");
    } else if (key == "uw") {
      ls >> v;
      sc.uw_shape = (v == "zero") ? UwShape::Zero : UwShape::Chirp;
    } else if (key == "es_n0_db") {
      double x;
      sc.es_n0_db.clear();
      while (ls >> x) sc.es_n0_db.push_back(x);
    } else if (key == "channel") ls >> channel;
    else if (key == "sub_corpus") ls >> sc.sub_corpus;
    else if (key == "csi") {
      ls >> v;
      sc.csi = (v == "estimated") ? CsiMode::Estimated : CsiMode::Perfect;
    } else if (key == "min_errors") ls >> sc.min_errors;
    else if (key == "max_bits") ls >> sc.max_bits;
    else if (key == "frame_symbols") ls >> sc.frame_ofdm_symbols;
    else if (key == "seed") ls >> sc.seed;
    else throw ConfigError("scenario: unknown key '" + key + "'");
  }
  if (channel != "awgn") {
    sf.corpus = std::make_shared<ChannelCorpus>(load_corpus(channel));
    sc.corpus = sf.corpus.get();
    sc.corpus_id = channel;
  }
  return sf;
}

}  // namespace uwofdm::sim
