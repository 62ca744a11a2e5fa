#ifndef CCM_EXPERIMENT_CONFIG_HPP
#define CCM_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ccm/channel_sim.hpp"

namespace ccm {

/// Campaign settings as seen by the CLI: flat key=value text file and/or
/// flags, flags taking precedence. Defaults are the reference parameter
/// set (200-bit blocks, pe_res 1e-5, gamma0 2, N 1000, W 20).
struct ExperimentConfig {
  std::string scheme = "size";
  std::string map = "bsm";
  std::vector<double> sigma2 = {0.5};
  double gamma0 = 2.0;
  double pe_res = 1e-5;
  int m_r = 5;
  int n_ref_bits = 1000;
  int eval_width = 20;
  int block_len = 200;
  int n_blocks = 10000;
  int d_max = 60;
  int q_max = 20;
  int t_flush = 100;
  int d0 = 3;
  std::uint64_t master_seed = 1;
  std::string out_dir = ".";

  bool operator==(const ExperimentConfig&) const = default;
};

Scheme parse_scheme(const std::string& name);
MapKind parse_map_kind(const std::string& name);

/// Parse flat key=value text ('#' comments, blank lines allowed).
/// Unknown keys and malformed values are rejected.
ExperimentConfig parse_config_text(const std::string& text);

/// Inverse of parse_config_text.
std::string serialize_config(const ExperimentConfig& cfg);

/// Validate and convert for one noise level.
CampaignConfig to_campaign(const ExperimentConfig& cfg, double sigma2);

}  // namespace ccm

#endif
