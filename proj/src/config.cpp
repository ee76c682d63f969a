#include "uwofdm/config.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

namespace uwofdm {

std::vector<int> SystemConfig::occupied_idx() const {
  std::unordered_set<int> zeros(zero_idx.begin(), zero_idx.end());
  std::vector<int> occ;
  occ.reserve(n_occupied());
  for (int k = 0; k < n; ++k)
    if (!zeros.count(k)) occ.push_back(k);
  return occ;
}

std::vector<int> SystemConfig::data_idx() const {
  std::unordered_set<int> red(red_idx.begin(), red_idx.end());
  std::vector<int> data;
  data.reserve(n_d());
  for (int k : occupied_idx())
    if (!red.count(k)) data.push_back(k);
  return data;
}

std::vector<int> SystemConfig::codeword_source() const {
  const auto occ = occupied_idx();
  std::unordered_set<int> red(red_idx.begin(), red_idx.end());
  std::vector<int> src(occ.size());
  int next_data = 0;
  int next_red = n_d();
  for (size_t i = 0; i < occ.size(); ++i)
    src[i] = red.count(occ[i]) ? next_red++ : next_data++;
  return src;
}

void SystemConfig::validate() const {
  auto bad = [this](const std::string& msg) { throw ConfigError("system config: " + msg); };
  if (n <= 0 || (n & (n - 1)) != 0) bad("DFT length must be a positive power of two");
  if (n_u <= 0 || n_u >= n) bad("unique-word length out of range");
  if (sigma_d2 <= 0.0) bad("sigma_d2 must be positive");
  if (fs <= 0.0) bad("sample rate must be positive");

  std::unordered_set<int> zeros;
  for (int k : zero_idx) {
    if (k < 0 || k >= n) bad("zero subcarrier index out of [0, N)");
    if (!zeros.insert(k).second) bad("duplicate zero subcarrier index");
  }
  std::unordered_set<int> reds;
  for (int k : red_idx) {
    if (k < 0 || k >= n) bad("redundant subcarrier index out of [0, N)");
    if (zeros.count(k)) bad("redundant index " + std::to_string(k) + " collides with a zero subcarrier");
    if (!reds.insert(k).second) bad("duplicate redundant subcarrier index");
  }
  if (!red_idx.empty() && static_cast<int>(red_idx.size()) != n_u)
    bad("redundant index count must equal n_u (or the set must be empty)");
  if (n_d() <= 0) bad("no data subcarriers left by the layout");
  if (!std::is_sorted(zero_idx.begin(), zero_idx.end()) ||
      !std::is_sorted(red_idx.begin(), red_idx.end()))
    bad("index sets must be ascending");
}

SystemConfig SystemConfig::ieee80211a() {
  SystemConfig cfg;
  cfg.n = 64;
  cfg.n_u = 16;
  cfg.sigma_d2 = 1.0;
  cfg.fs = 20e6;
  cfg.zero_idx = {0, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37};
  cfg.red_idx = {2, 6, 10, 14, 17, 21, 24, 26, 38, 40, 43, 47, 50, 54, 58, 62};
  cfg.validate();
  return cfg;
}

SystemConfig SystemConfig::single_carrier(int n, int n_r) {
  SystemConfig cfg;
  cfg.n = n;
  cfg.n_u = n_r;
  cfg.zero_idx.clear();
  cfg.red_idx.clear();
  cfg.validate();
  return cfg;
}

bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return a.n == b.n && a.n_u == b.n_u && a.sigma_d2 == b.sigma_d2 && a.fs == b.fs &&
         a.zero_idx == b.zero_idx && a.red_idx == b.red_idx;
}

namespace {

std::vector<int> parse_index_list(std::istringstream& rest) {
  std::vector<int> out;
  int v;
  while (rest >> v) out.push_back(v);
  return out;
}

}  // namespace

SystemConfig parse_config(std::istream& in) {
  SystemConfig cfg = SystemConfig::ieee80211a();
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    // Accept both "key value" and "key = value".
    std::string eq;
    const auto pos = ls.tellg();
    if (ls >> eq && eq != "=") ls.seekg(pos);

    if (key == "n") ls >> cfg.n;
    else if (key == "n_u") ls >> cfg.n_u;
    else if (key == "sigma_d2") ls >> cfg.sigma_d2;
    else if (key == "fs") ls >> cfg.fs;
    else if (key == "zero_idx") cfg.zero_idx = parse_index_list(ls);
    else if (key == "red_idx") cfg.red_idx = parse_index_list(ls);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

void save_config(const SystemConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path);
  out << "# uwofdm system config v1\n";
  out << std::setprecision(17);
  out << "n " << cfg.n << "\n";
  out << "n_u " << cfg.n_u << "\n";
  out << "sigma_d2 " << cfg.sigma_d2 << "\n";
  out << "fs " << cfg.fs << "\n";
  out << "zero_idx";
  for (int k : cfg.zero_idx) out << ' ' << k;
  out << "\nred_idx";
  for (int k : cfg.red_idx) out << ' ' << k;
  out << "\n";
}

}  // namespace uwofdm
