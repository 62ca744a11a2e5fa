#ifndef CCM_CHANNEL_SIM_HPP
#define CCM_CHANNEL_SIM_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ccm/adaptive_bandwidth.hpp"
#include "ccm/maps.hpp"

namespace ccm {

enum class Scheme { AdaptiveSize, AdaptiveBandwidth };

const char* scheme_name(Scheme s);

struct CampaignConfig {
  Scheme scheme = Scheme::AdaptiveSize;
  MapModel map;
  double sigma2 = 0.5;
  double gamma0 = 2.0;   // adaptive-size normalization base, Gamma_q = gamma0 * 2^q
  double pe_res = 1e-5;
  int m_r = 5;           // adaptive-bandwidth BSM run-length limit
  int n_ref_bits = 1000; // adaptive-bandwidth reference sequence length
  int block_len = 200;
  int n_blocks = 10000;
  int d_max = 60;
  int q_max = 20;
  int t_flush = 100;
  std::uint64_t master_seed = 1;
  int n_workers = 0;     // 0: CHAOSCOMM_THREADS env var, else hardware
};

/// Aggregated campaign results. Counting fields are integers so that the
/// merge is exactly order-independent; energy is reduced in block order.
struct Metrics {
  int block_len = 0;
  int d_max = 0;
  std::vector<std::uint64_t> errors;  // [pos][d] flattened, pos,d 1-based
  std::vector<std::uint64_t> trials;
  std::vector<std::uint64_t> eff_hist;  // index q
  double total_energy = 0.0;
  std::uint64_t total_steps = 0;
  std::uint64_t total_dims = 0;
  std::uint64_t released_bits = 0;
  std::uint64_t released_errors = 0;
  std::uint64_t unresolved_bits = 0;
  std::uint64_t failed_blocks = 0;

  Metrics() = default;
  Metrics(int block_len, int d_max);
  Metrics& operator+=(const Metrics& other);

  std::uint64_t& err_at(int pos, int d) {
    return errors[static_cast<std::size_t>(pos - 1) * d_max + (d - 1)];
  }
  std::uint64_t& trials_at(int pos, int d) {
    return trials[static_cast<std::size_t>(pos - 1) * d_max + (d - 1)];
  }

  double mean_d() const;
  double std_d() const;
  double snr_db(double sigma2) const;
  double residual_rate() const;
  /// Pooled error probability per delay, index d-1; NaN where unobserved.
  std::vector<double> avg_ber() const;
};

/// Counter-mode substream derivation: identical (master, index) pairs
/// give bit-identical streams regardless of scheduling.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// AWGN channel: adds i.i.d. zero-mean variance-sigma2 noise.
std::vector<double> awgn(std::span<const double> samples, double sigma2,
                         std::mt19937_64& rng);

/// One full block: encode -> AWGN -> decode -> prune loop with ideal
/// feedback, then the flush phase. Deterministic given the seed; ref may
/// be null for the adaptive-size scheme. Returns the block energy.
double simulate_block(const CampaignConfig& config, const RefTrajectories* ref,
                      std::uint64_t block_index, Metrics& acc);

/// Reference trajectories used by every block of a campaign.
RefTrajectories campaign_trajectories(const CampaignConfig& config);

Metrics run_campaign(const CampaignConfig& config);

// --- machine-readable outputs (stable public contract) ---

std::string ber_by_position_csv(const Metrics& m);
std::string ber_avg_csv(const Metrics& m);
std::string efficiency_hist_csv(const Metrics& m);
std::string summary_json(const Metrics& m, const CampaignConfig& config);

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least-squares line through (d, ln p) over the pre-floor range
/// (p >= floor).
LogLinearFit fit_log_ber(const std::vector<double>& avg_ber, double floor = 1e-4);

}  // namespace ccm

#endif
