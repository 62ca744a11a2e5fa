#include "ccm/experiment_config.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ccm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "size") return Scheme::AdaptiveSize;
  if (name == "bw") return Scheme::AdaptiveBandwidth;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected size|bw)");
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "bsm") return MapKind::BSM;
  if (name == "tent") return MapKind::Tent;
  if (name == "logistic") return MapKind::Logistic;
  throw std::invalid_argument("unknown map '" + name + "' (expected bsm|tent|logistic)");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "scheme") {
        parse_scheme(val);
        cfg.scheme = val;
      } else if (key == "map") {
        parse_map_kind(val);
        cfg.map = val;
      } else if (key == "sigma2") {
        cfg.sigma2 = parse_double_list(val);
      } else if (key == "gamma0") {
        cfg.gamma0 = std::stod(val);
      } else if (key == "pe_res") {
        cfg.pe_res = std::stod(val);
      } else if (key == "mr") {
        cfg.m_r = std::stoi(val);
      } else if (key == "N") {
        cfg.n_ref_bits = std::stoi(val);
      } else if (key == "W") {
        cfg.eval_width = std::stoi(val);
      } else if (key == "block_len") {
        cfg.block_len = std::stoi(val);
      } else if (key == "n_blocks") {
        cfg.n_blocks = std::stoi(val);
      } else if (key == "d_max") {
        cfg.d_max = std::stoi(val);
      } else if (key == "q_max") {
        cfg.q_max = std::stoi(val);
      } else if (key == "t_flush") {
        cfg.t_flush = std::stoi(val);
      } else if (key == "d0") {
        cfg.d0 = std::stoi(val);
      } else if (key == "seed") {
        cfg.master_seed = std::stoull(val);
      } else if (key == "out") {
        cfg.out_dir = val;
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "scheme=" + cfg.scheme + "\n";
  out += "map=" + cfg.map + "\n";
  out += "sigma2=";
  for (std::size_t i = 0; i < cfg.sigma2.size(); ++i)
    out += (i ? "," : "") + fmt(cfg.sigma2[i]);
  out += "\n";
  out += "gamma0=" + fmt(cfg.gamma0) + "\n";
  out += "pe_res=" + fmt(cfg.pe_res) + "\n";
  out += "mr=" + std::to_string(cfg.m_r) + "\n";
  out += "N=" + std::to_string(cfg.n_ref_bits) + "\n";
  out += "W=" + std::to_string(cfg.eval_width) + "\n";
  out += "block_len=" + std::to_string(cfg.block_len) + "\n";
  out += "n_blocks=" + std::to_string(cfg.n_blocks) + "\n";
  out += "d_max=" + std::to_string(cfg.d_max) + "\n";
  out += "q_max=" + std::to_string(cfg.q_max) + "\n";
  out += "t_flush=" + std::to_string(cfg.t_flush) + "\n";
  out += "d0=" + std::to_string(cfg.d0) + "\n";
  out += "seed=" + std::to_string(cfg.master_seed) + "\n";
  out += "out=" + cfg.out_dir + "\n";
  return out;
}

CampaignConfig to_campaign(const ExperimentConfig& cfg, double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
  if (cfg.gamma0 <= 0.0) throw std::invalid_argument("gamma0 must be positive");
  if (!(cfg.pe_res > 0.0 && cfg.pe_res < 0.5))
    throw std::invalid_argument("pe_res must be in (0, 0.5)");
  if (cfg.block_len < 1) throw std::invalid_argument("block_len must be >= 1");
  if (cfg.n_blocks < 1) throw std::invalid_argument("n_blocks must be >= 1");
  if (cfg.d_max < 1) throw std::invalid_argument("d_max must be >= 1");
  if (cfg.q_max < 1 || cfg.q_max > 24) throw std::invalid_argument("q_max must be in [1, 24]");
  if (cfg.t_flush < 0) throw std::invalid_argument("t_flush must be >= 0");
  if (cfg.m_r < 1) throw std::invalid_argument("mr must be >= 1");
  if (cfg.eval_width < 4 || cfg.eval_width > 52)
    throw std::invalid_argument("W must be in [4, 52]");
  if (cfg.n_ref_bits <= cfg.eval_width)
    throw std::invalid_argument("N must exceed W");

  CampaignConfig c;
  c.scheme = parse_scheme(cfg.scheme);
  c.map = MapModel{parse_map_kind(cfg.map), cfg.eval_width};
  c.sigma2 = sigma2;
  c.gamma0 = cfg.gamma0;
  c.pe_res = cfg.pe_res;
  c.m_r = cfg.m_r;
  c.n_ref_bits = cfg.n_ref_bits;
  c.block_len = cfg.block_len;
  c.n_blocks = cfg.n_blocks;
  c.d_max = cfg.d_max;
  c.q_max = cfg.q_max;
  c.t_flush = cfg.t_flush;
  c.master_seed = cfg.master_seed;
  return c;
}

}  // namespace ccm
