#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccm/analysis.hpp"
#include "ccm/channel_sim.hpp"
#include "ccm/experiment_config.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

// attach the shared experiment options; flags override any --config file
void add_experiment_options(CLI::App* cmd, ccm::ExperimentConfig& cfg,
                            std::string& config_path) {
  cmd->add_option("--config", config_path, "flat key=value config file");
  cmd->add_option("--scheme", cfg.scheme, "size|bw");
  cmd->add_option("--map", cfg.map, "bsm|tent|logistic");
  cmd->add_option("--sigma2", cfg.sigma2, "noise variance(s) per dimension");
  cmd->add_option("--gamma0", cfg.gamma0, "normalization base, Gamma_q = gamma0*2^q");
  cmd->add_option("--pe-res", cfg.pe_res, "reliability threshold");
  cmd->add_option("--mr", cfg.m_r, "max run length (bw BSM)");
  cmd->add_option("--N", cfg.n_ref_bits, "reference sequence length (bw)");
  cmd->add_option("--W", cfg.eval_width, "mapper evaluation width (bits)");
  cmd->add_option("--block-len", cfg.block_len, "information bits per block");
  cmd->add_option("--n-blocks", cfg.n_blocks, "number of simulated blocks");
  cmd->add_option("--d-max", cfg.d_max, "max tracked decoding delay");
  cmd->add_option("--q-max", cfg.q_max, "encoder queue cap");
  cmd->add_option("--t-flush", cfg.t_flush, "end-of-block flush channel uses");
  cmd->add_option("--seed", cfg.master_seed, "master seed");
  cmd->add_option("--out", cfg.out_dir, "output directory");
}

// re-apply command-line values on top of the config file
ccm::ExperimentConfig merge_config(CLI::App* cmd, const ccm::ExperimentConfig& cli_cfg,
                                   const std::string& config_path) {
  if (config_path.empty()) return cli_cfg;
  ccm::ExperimentConfig cfg = ccm::parse_config_text(read_file(config_path));
  const auto set = [&](const char* name) { return cmd->count(name) > 0; };
  if (set("--scheme")) cfg.scheme = cli_cfg.scheme;
  if (set("--map")) cfg.map = cli_cfg.map;
  if (set("--sigma2")) cfg.sigma2 = cli_cfg.sigma2;
  if (set("--gamma0")) cfg.gamma0 = cli_cfg.gamma0;
  if (set("--pe-res")) cfg.pe_res = cli_cfg.pe_res;
  if (set("--mr")) cfg.m_r = cli_cfg.m_r;
  if (set("--N")) cfg.n_ref_bits = cli_cfg.n_ref_bits;
  if (set("--W")) cfg.eval_width = cli_cfg.eval_width;
  if (set("--block-len")) cfg.block_len = cli_cfg.block_len;
  if (set("--n-blocks")) cfg.n_blocks = cli_cfg.n_blocks;
  if (set("--d-max")) cfg.d_max = cli_cfg.d_max;
  if (set("--q-max")) cfg.q_max = cli_cfg.q_max;
  if (set("--t-flush")) cfg.t_flush = cli_cfg.t_flush;
  if (set("--seed")) cfg.master_seed = cli_cfg.master_seed;
  if (set("--out")) cfg.out_dir = cli_cfg.out_dir;
  return cfg;
}

struct BoundsRow {
  double sigma2 = 0.0;
  double gamma_bar = 0.0;
};

int cmd_bounds(const ccm::ExperimentConfig& cfg, int d0) {
  const ccm::Scheme scheme = ccm::parse_scheme(cfg.scheme);
  const ccm::MapModel map{ccm::parse_map_kind(cfg.map), cfg.eval_width};

  std::string csv = "scheme,map,quantity,value\n";
  std::printf("scheme=%s map=%s\n", cfg.scheme.c_str(), cfg.map.c_str());

  if (scheme == ccm::Scheme::AdaptiveSize) {
    const auto beta = ccm::beta_size(map, cfg.gamma0);
    if (!beta) {
      std::printf("  beta: conditions not satisfied (vanishing inverse-CDF derivative)\n");
      csv += std::string("size,") + cfg.map + ",beta,nan\n";
    } else {
      const double s2sup = ccm::sigma2_sup(*beta, d0);
      std::printf("  beta        = %.10g\n", *beta);
      std::printf("  sigma2_sup  = %.10g   (d0 = %d)\n", s2sup, d0);
      csv += std::string("size,") + cfg.map + ",beta," + std::to_string(*beta) + "\n";
      csv += std::string("size,") + cfg.map + ",sigma2_sup," + std::to_string(s2sup) + "\n";
      for (double s2 : cfg.sigma2) {
        const double g = ccm::gamma_bar_size(*beta, s2, d0);
        std::printf("  gamma_bar(sigma2=%g) = %.10g%s\n", s2, g,
                    g > 0 ? "" : "  [outside guarantee region]");
        csv += std::string("size,") + cfg.map + ",gamma_bar@" + std::to_string(s2) + "," +
               std::to_string(g) + "\n";
      }
    }
  } else {
    const double beta = map.kind == ccm::MapKind::BSM
                            ? ccm::beta_bw_bsm(cfg.m_r, map)
                            : ccm::beta_bw_tent(map);
    std::printf("  beta        = %.10g%s\n", beta,
                map.kind == ccm::MapKind::BSM ? "  (run-length constrained)" : "");
    csv += std::string("bw,") + cfg.map + ",beta," + std::to_string(beta) + "\n";
    for (double s2 : cfg.sigma2) {
      const double g = ccm::gamma_bar_bw(beta, s2);
      std::printf("  gamma_bar(sigma2=%g) = %.10g\n", s2, g);
      csv += std::string("bw,") + cfg.map + ",gamma_bar@" + std::to_string(s2) + "," +
             std::to_string(g) + "\n";
    }
  }

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "bounds.csv", csv);
  return 0;
}

int cmd_tsb(const ccm::ExperimentConfig& cfg, int n) {
  const ccm::MapModel map{ccm::parse_map_kind(cfg.map), cfg.eval_width};
  const double sigma2 = cfg.sigma2.front();
  std::string csv = "d,bound\n";
  for (int d = 1; d <= cfg.d_max; ++d) {
    const auto r = ccm::tsb(n, d, sigma2, map, cfg.gamma0);
    csv += std::to_string(d) + ',';
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", r.value);
    csv += buf;
    csv += '\n';
  }
  std::fputs(csv.c_str(), stdout);
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "tsb.csv", csv);
  return 0;
}

void write_campaign_outputs(const ccm::Metrics& m, const ccm::CampaignConfig& c,
                            const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "ber_by_position.csv", ccm::ber_by_position_csv(m));
  write_file(dir / "ber_avg.csv", ccm::ber_avg_csv(m));
  write_file(dir / "efficiency_hist.csv", ccm::efficiency_hist_csv(m));
  write_file(dir / "summary.json", ccm::summary_json(m, c));
}

int cmd_simulate(const ccm::ExperimentConfig& cfg) {
  const auto campaign = ccm::to_campaign(cfg, cfg.sigma2.front());
  const auto metrics = ccm::run_campaign(campaign);
  write_campaign_outputs(metrics, campaign, cfg.out_dir);
  std::printf("%s %s sigma2=%g: mean_d=%.4f std_d=%.4f snr_db=%.2f residual=%.3g\n",
              cfg.scheme.c_str(), cfg.map.c_str(), campaign.sigma2, metrics.mean_d(),
              metrics.std_d(), metrics.snr_db(campaign.sigma2), metrics.residual_rate());
  return 0;
}

int cmd_sweep(const ccm::ExperimentConfig& cfg, const std::vector<std::string>& maps) {
  std::string csv = "scheme,map,sigma2,mean_d,std_d,snr_db,residual_rate\n";
  for (const std::string& map_name : maps) {
    for (double s2 : cfg.sigma2) {
      ccm::ExperimentConfig one = cfg;
      one.map = map_name;
      const auto campaign = ccm::to_campaign(one, s2);
      const auto m = ccm::run_campaign(campaign);
      char buf[200];
      std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                    cfg.scheme.c_str(), map_name.c_str(), s2, m.mean_d(), m.std_d(),
                    m.snr_db(s2), m.residual_rate());
      csv += buf;
      std::fputs(buf, stdout);
    }
  }
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "sweep.csv", csv);
  return 0;
}

int cmd_control_threshold(const std::string& matrix_path) {
  std::ifstream in(matrix_path);
  if (!in) throw std::invalid_argument("cannot open '" + matrix_path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const double g = ccm::required_exponent(rows);
  std::printf("required anytime exponent: gamma > %.10g\n", g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaos-based anytime reliable coded modulation toolkit"};
  app.require_subcommand(1);

  ccm::ExperimentConfig cfg;
  std::string config_path;
  int d0 = 3;
  int tsb_n = 1;
  std::vector<std::string> sweep_maps = {"bsm", "tent", "logistic"};
  std::string matrix_path;

  auto* bounds = app.add_subcommand("bounds", "analytic constants and exponent bounds");
  add_experiment_options(bounds, cfg, config_path);
  bounds->add_option("--d0", d0, "minimum delay in Prop. bounds");

  auto* tsb_cmd = app.add_subcommand("tsb", "tangential-sphere bound curve (d,bound)");
  add_experiment_options(tsb_cmd, cfg, config_path);
  tsb_cmd->add_option("--n", tsb_n, "bit position");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo campaign, CSV/JSON outputs");
  add_experiment_options(simulate, cfg, config_path);

  auto* sweep = app.add_subcommand("sweep", "table-shaped sweep over sigma2 x maps");
  add_experiment_options(sweep, cfg, config_path);
  sweep->add_option("--maps", sweep_maps, "maps to sweep");

  auto* control = app.add_subcommand("control-threshold",
                                     "stabilization threshold 2 ln rho(|A|)");
  control->add_option("--matrix", matrix_path, "whitespace-separated matrix file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const ccm::ExperimentConfig merged = merge_config(cmd, cfg, config_path);
    if (cmd == bounds) return cmd_bounds(merged, d0);
    if (cmd == tsb_cmd) return cmd_tsb(merged, tsb_n);
    if (cmd == simulate) return cmd_simulate(merged);
    if (cmd == sweep) return cmd_sweep(merged, sweep_maps);
    return cmd_control_threshold(matrix_path);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
