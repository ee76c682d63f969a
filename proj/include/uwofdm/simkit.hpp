// End-to-end Monte-Carlo harness: CP-OFDM reference system, BER runs over
// AWGN or the stored channel corpus, Welch PSD estimation, and results
// persistence.
//
// Es/N0 axis convention (held fixed for all systems): Es is the total mean
// transmit energy per OFDM symbol -- unique word, pilots and cyclic prefix
// included -- divided by the number of payload QAM symbols (n_d for UW
// systems, 48 for CP-OFDM); N0 is the per-sample complex noise variance
// sigma_n^2. At a given axis point every system therefore spends the same
// transmit energy per payload bit relative to the noise level.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uwofdm/channel.hpp"
#include "uwofdm/codegen.hpp"
#include "uwofdm/config.hpp"
#include "uwofdm/fec.hpp"
#include "uwofdm/receiver.hpp"
#include "uwofdm/types.hpp"

namespace uwofdm::sim {

/// 802.11a-style CP-OFDM reference: 48 data subcarriers, 4 pilots, CP of 16.
struct CpOfdmConfig {
  int n = 64;
  int cp_len = 16;
  std::vector<int> zero_idx;   // as the UW layout
  std::vector<int> pilot_idx;  // +-7, +-21
  double sigma_d2 = 1.0;
  double fs = 20e6;

  int data_sc() const {
    return n - cp_pilots() - static_cast<int>(zero_idx.size());
  }
  int cp_pilots() const { return static_cast<int>(pilot_idx.size()); }
  std::vector<int> data_idx() const;
  void validate() const;

  static CpOfdmConfig ieee80211a();
};

enum class RxEstimator { Blue, Lmmse, Ci };
enum class CsiMode { Perfect, Estimated };
enum class OuterRate { None, Half, ThreeQuarter };
enum class UwShape { Zero, Chirp };

std::string to_string(RxEstimator e);
std::string to_string(OuterRate r);
std::string to_string(fec::Constellation c);

/// One BER measurement campaign for a single system variant.
struct Scenario {
  std::string system_id = "uw";
  bool is_cp = false;
  GeneratorMatrix gen;  // UW systems only
  SystemConfig cfg = SystemConfig::ieee80211a();
  CpOfdmConfig cp_cfg = CpOfdmConfig::ieee80211a();

  RxEstimator estimator = RxEstimator::Lmmse;
  OuterRate rate = OuterRate::None;
  fec::Constellation constellation = fec::Constellation::Qpsk;
  UwShape uw_shape = UwShape::Chirp;

  std::vector<double> es_n0_db;

  // Channel: AWGN when no corpus is attached.
  const ChannelCorpus* corpus = nullptr;
  std::string corpus_id = "awgn";
  int sub_corpus = 0;  // leading realizations to use; 0 = all

  CsiMode csi = CsiMode::Perfect;

  long long min_errors = 100;
  long long max_bits = 2'000'000;
  int frame_ofdm_symbols = 4;
  uint64_t seed = 1;

  /// Canonical one-line description; its hash is the record fingerprint.
  std::string canonical() const;
  std::string fingerprint() const;
};

/// One row of the Monte-Carlo results store.
struct BerRecord {
  std::string system_id;
  std::string estimator;
  std::string outer_rate;
  std::string constellation;
  double es_n0_db = 0.0;
  long long bits_sent = 0;
  long long bit_errors = 0;
  std::string corpus_id;
  uint64_t seed = 0;
  std::string fingerprint;
  bool hit_min_errors = false;  // stop-rule flag: reached min_errors vs max_bits

  double ber() const {
    return bits_sent > 0 ? static_cast<double>(bit_errors) / static_cast<double>(bits_sent) : 0.0;
  }
};

/// Run the scenario over its Es/N0 grid. Deterministic for fixed seeds.
/// Throws ConfigError for invalid combinations (e.g. CI with a
/// non-systematic generator) or a missing corpus.
std::vector<BerRecord> run_ber(const Scenario& sc);

// --- Energy bookkeeping ------------------------------------------------------

/// Linear chirp over n_u samples scaled to total energy; constant envelope.
CVec chirp_uw(int n_u, double energy);

/// Unique-word energy for the 4/52 total-energy policy: E_u = E_data / 12.
double uw_energy(const GeneratorMatrix& g, const SystemConfig& cfg);

/// Mean transmit energy per OFDM symbol (UW / pilots / CP included).
double mean_tx_energy(const Scenario& sc);

/// Payload QAM symbols per OFDM symbol (n_d or 48).
int payload_symbols(const Scenario& sc);

/// Es for the axis convention documented above.
double es_per_payload_symbol(const Scenario& sc);

// --- CP-OFDM reference chain -------------------------------------------------

/// 64-sample symbol body (pilots loaded, data mapped); the transmitted
/// symbol additionally carries a cp_len prefix copied from the tail.
TimeSymbol cp_ofdm_body(const CpOfdmConfig& cfg, const std::vector<Complex>& data);

/// One-tap equalization of a received symbol body: returns the data-subcarrier
/// estimates and their noise variances n_sigma_n2 / |H_k|^2.
void cp_ofdm_rx(const CpOfdmConfig& cfg, const TimeSymbol& y_body,
                const CVec& h_occupied, double n_sigma_n2,
                std::vector<Complex>& data_out, std::vector<double>& var_out);

// --- PSD ---------------------------------------------------------------------

struct PsdRequest {
  bool is_cp = false;
  const GeneratorMatrix* gen = nullptr;
  SystemConfig cfg = SystemConfig::ieee80211a();
  CpOfdmConfig cp_cfg = CpOfdmConfig::ieee80211a();
  UwShape uw_shape = UwShape::Zero;  // PSD runs use the zero UW
  int n_symbols = 1000;
  int segment = 256;  // Welch segment (Hann window, half-overlap)
  uint64_t seed = 7;
};

struct PsdCurve {
  RVec freq_hz;  // centered axis, -fs/2 .. fs/2
  RVec psd_db;   // normalized to 0 dB in-band peak
};

PsdCurve run_psd(const PsdRequest& req);

/// Mean dB level over |f| in [f_lo, f_hi].
double band_mean_db(const PsdCurve& curve, double f_lo, double f_hi);
/// Max - min dB over |f| <= f_hi (in-band ripple helper).
double band_ripple_db(const PsdCurve& curve, double f_hi);

// --- Results persistence -----------------------------------------------------

/// Append records to a TSV results store ("uwofdm ber results v1"); the file
/// is created with a header when missing. Reload is bit-identical.
void export_results(const std::vector<BerRecord>& records, const std::string& path);
std::vector<BerRecord> load_results(const std::string& path);

/// One plain (Es/N0, BER) curve file per distinct fingerprint, named
/// <system_id>_<fingerprint>.dat under dir.
void write_curve_files(const std::vector<BerRecord>& records, const std::string& dir);

/// Scenario file: same key/value syntax as the system config file.
/// Keys: system (cp-ofdm | uw), matrix (generator file, UW only), estimator
/// (blue | lmmse | ci), rate (none | 1/2 | 3/4), constellation (qpsk | 16qam),
/// es_n0_db (list), channel (awgn | corpus path), sub_corpus, csi
/// (perfect | estimated), uw (chirp | zero), min_errors, max_bits,
/// frame_symbols, seed, system_id, config (system config file).
struct ScenarioFile {
  Scenario scenario;
  std::shared_ptr<ChannelCorpus> corpus;  // owns the corpus the scenario points at
};

ScenarioFile load_scenario(const std::string& path);

}  // namespace uwofdm::sim
