#include "ccm/channel_sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ccm/adaptive_size.hpp"

namespace ccm {

namespace {

constexpr std::size_t kEffHistSize = 2048;
constexpr std::uint64_t kRefStreamIndex = 0x5245462d5245462dULL;  // outside block range

int bernoulli_bit(std::mt19937_64& rng) {
  return static_cast<int>(rng() >> 63);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

const char* scheme_name(Scheme s) {
  return s == Scheme::AdaptiveSize ? "size" : "bw";
}

Metrics::Metrics(int block_len_, int d_max_)
    : block_len(block_len_),
      d_max(d_max_),
      errors(static_cast<std::size_t>(block_len_) * d_max_, 0),
      trials(static_cast<std::size_t>(block_len_) * d_max_, 0),
      eff_hist(kEffHistSize, 0) {}

Metrics& Metrics::operator+=(const Metrics& other) {
  if (block_len != other.block_len || d_max != other.d_max)
    throw std::invalid_argument("Metrics: incompatible shapes");
  for (std::size_t i = 0; i < errors.size(); ++i) errors[i] += other.errors[i];
  for (std::size_t i = 0; i < trials.size(); ++i) trials[i] += other.trials[i];
  for (std::size_t i = 0; i < eff_hist.size(); ++i) eff_hist[i] += other.eff_hist[i];
  total_energy += other.total_energy;
  total_steps += other.total_steps;
  total_dims += other.total_dims;
  released_bits += other.released_bits;
  released_errors += other.released_errors;
  unresolved_bits += other.unresolved_bits;
  failed_blocks += other.failed_blocks;
  return *this;
}

double Metrics::mean_d() const {
  double sum = 0.0, n = 0.0;
  for (std::size_t q = 1; q < eff_hist.size(); ++q) {
    sum += static_cast<double>(q) * eff_hist[q];
    n += static_cast<double>(eff_hist[q]);
  }
  return n > 0 ? sum / n : 0.0;
}

double Metrics::std_d() const {
  const double mean = mean_d();
  double sum = 0.0, n = 0.0;
  for (std::size_t q = 1; q < eff_hist.size(); ++q) {
    const double dev = static_cast<double>(q) - mean;
    sum += dev * dev * eff_hist[q];
    n += static_cast<double>(eff_hist[q]);
  }
  return n > 0 ? std::sqrt(sum / n) : 0.0;
}

double Metrics::snr_db(double sigma2) const {
  if (total_steps == 0) return 0.0;
  return 10.0 * std::log10(total_energy / static_cast<double>(total_steps) / sigma2);
}

double Metrics::residual_rate() const {
  return released_bits > 0
             ? static_cast<double>(released_errors) / static_cast<double>(released_bits)
             : 0.0;
}

std::vector<double> Metrics::avg_ber() const {
  std::vector<double> p(static_cast<std::size_t>(d_max),
                        std::numeric_limits<double>::quiet_NaN());
  for (int d = 1; d <= d_max; ++d) {
    std::uint64_t e = 0, t = 0;
    for (int pos = 1; pos <= block_len; ++pos) {
      const std::size_t idx = static_cast<std::size_t>(pos - 1) * d_max + (d - 1);
      e += errors[idx];
      t += trials[idx];
    }
    if (t > 0) p[static_cast<std::size_t>(d - 1)] = static_cast<double>(e) / static_cast<double>(t);
  }
  return p;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over the (master, index) pair
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> awgn(std::span<const double> samples, double sigma2,
                         std::mt19937_64& rng) {
  if (sigma2 < 0.0) throw std::invalid_argument("awgn: negative variance");
  std::vector<double> out(samples.begin(), samples.end());
  if (sigma2 == 0.0) return out;
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  for (double& v : out) v += noise(rng);
  return out;
}

namespace {

// Shared per-block bookkeeping for both schemes.
struct BlockTracker {
  const CampaignConfig* cfg;
  Metrics* acc;
  std::vector<std::uint8_t> truth;
  std::vector<int> decision;  // -1: pending
  int released_count = 0;
  int t = 0;

  BlockTracker(const CampaignConfig& c, Metrics& a) : cfg(&c), acc(&a) {
    decision.assign(static_cast<std::size_t>(c.block_len), -1);
  }

  // record correctness of every bit within the delay window at time t,
  // before pruning: pending bits by current LLR sign, released frozen
  template <class Estimator>
  void record(const Estimator& pending_estimate) {
    const int sent = static_cast<int>(truth.size());
    const int lo = std::max(1, t - cfg->d_max + 1);
    for (int n = lo; n <= std::min(t, sent); ++n) {
      const int d = t - n + 1;
      int est;
      if (n <= released_count)
        est = decision[static_cast<std::size_t>(n - 1)];
      else
        est = pending_estimate(n - 1 - released_count);
      ++acc->trials_at(n, d);
      if (est != truth[static_cast<std::size_t>(n - 1)]) ++acc->err_at(n, d);
    }
  }

  void release(const std::vector<std::uint8_t>& released) {
    for (std::uint8_t b : released) {
      decision[static_cast<std::size_t>(released_count)] = b;
      ++acc->released_bits;
      if (b != truth[static_cast<std::size_t>(released_count)]) ++acc->released_errors;
      ++released_count;
    }
  }

  void step_stats(int q) {
    const auto qi = std::min<std::size_t>(static_cast<std::size_t>(q), kEffHistSize - 1);
    ++acc->eff_hist[qi];
    ++acc->total_steps;
    acc->total_dims += static_cast<std::uint64_t>(q);
  }

  // unresolved pending bits count as errors at every remaining delay
  void finalize(bool failed) {
    const int sent = static_cast<int>(truth.size());
    for (int n = released_count + 1; n <= sent; ++n) {
      ++acc->unresolved_bits;
      for (int d = t - n + 2; d <= cfg->d_max; ++d) {
        if (d < 1) continue;
        ++acc->trials_at(n, d);
        ++acc->err_at(n, d);
      }
    }
    if (failed) ++acc->failed_blocks;
  }
};

// Average transmit power at efficiency q, over equiprobable cells: the
// power the normalization Gamma_q = gamma0*2^q sets by design. Realized
// per-step energy is a biased estimate of it (pending queues that survive
// pruning favor low-amplitude patterns), so power accounting uses the
// design value, matching the reported average-SNR statistic.
double quantizer_power(const MapModel& map, double gamma0, int q) {
  const double g2 = gamma0 * gamma0 * std::ldexp(1.0, 2 * q);
  if (map.kind == MapKind::Logistic) return g2 / 8.0;  // arcsine levels
  return g2 * (1.0 - std::ldexp(1.0, -2 * q)) / 12.0;  // uniform levels
}

double simulate_block_size(const CampaignConfig& cfg, std::uint64_t block_index,
                           Metrics& acc) {
  std::mt19937_64 rng(substream_seed(cfg.master_seed, block_index));
  SizeEncoder enc(cfg.map, cfg.gamma0, cfg.q_max);
  SizeDecoder dec(cfg.map, cfg.gamma0, cfg.sigma2, cfg.pe_res);
  BlockTracker trk(cfg, acc);
  double energy = 0.0;
  bool failed = false;

  const auto pending_est = [&](int j) { return dec.estimate(j); };
  const auto step = [&](double s, bool new_bit) {
    ++trk.t;
    const double r = awgn(std::span<const double>(&s, 1), cfg.sigma2, rng)[0];
    dec.update(r, new_bit);
    energy += quantizer_power(cfg.map, cfg.gamma0, enc.pending());
    trk.step_stats(enc.pending());
    trk.record(pending_est);
    const auto pruned = dec.prune();
    trk.release(pruned.released);
    enc.release(static_cast<int>(pruned.released.size()));
  };

  for (int n = 0; n < cfg.block_len; ++n) {
    const int bit = bernoulli_bit(rng);
    const auto s = enc.encode_step(bit);
    if (!s) {  // q_max overflow: flush failure
      failed = true;
      break;
    }
    trk.truth.push_back(static_cast<std::uint8_t>(bit));
    step(*s, true);
  }
  for (int f = 0; !failed && enc.pending() > 0 && f < cfg.t_flush; ++f)
    step(enc.current_symbol(), false);

  trk.finalize(failed);
  return energy;
}

double simulate_block_bw(const CampaignConfig& cfg, const RefTrajectories& ref,
                         std::uint64_t block_index, Metrics& acc) {
  std::mt19937_64 rng(substream_seed(cfg.master_seed, block_index));
  BwEncoder enc(&ref);
  BwDecoder dec(&ref, cfg.sigma2, cfg.pe_res);
  BlockTracker trk(cfg, acc);
  double energy = 0.0;
  bool failed = false;
  std::vector<double> s;

  const auto pending_est = [&](int j) { return dec.estimate(j); };
  const auto step = [&](bool new_bit) {
    ++trk.t;
    const auto r = awgn(s, cfg.sigma2, rng);
    dec.update(r, new_bit);
    double e = 0.0;
    for (double v : s) e += v * v;
    energy += e;
    trk.step_stats(static_cast<int>(s.size()));
    trk.record(pending_est);
    const auto pruned = dec.prune();
    trk.release(pruned.released);
    enc.release(static_cast<int>(pruned.released.size()));
  };

  for (int n = 0; n < cfg.block_len; ++n) {
    const int bit = bernoulli_bit(rng);
    trk.truth.push_back(static_cast<std::uint8_t>(bit));
    if (!enc.encode_step(bit, s)) {  // trajectory exhaustion
      trk.truth.pop_back();
      failed = true;
      break;
    }
    step(true);
  }
  for (int f = 0; !failed && enc.pending() > 0 && f < cfg.t_flush; ++f) {
    if (!enc.flush_step(s)) {
      failed = true;
      break;
    }
    step(false);
  }

  trk.finalize(failed);
  return energy;
}

int resolve_workers(const CampaignConfig& cfg) {
  int n = cfg.n_workers;
  if (n <= 0) {
    if (const char* env = std::getenv("CHAOSCOMM_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::min(n, cfg.n_blocks);
}

}  // namespace

double simulate_block(const CampaignConfig& config, const RefTrajectories* ref,
                      std::uint64_t block_index, Metrics& acc) {
  if (config.scheme == Scheme::AdaptiveSize)
    return simulate_block_size(config, block_index, acc);
  if (ref == nullptr)
    throw std::invalid_argument("simulate_block: adaptive-bandwidth needs trajectories");
  return simulate_block_bw(config, *ref, block_index, acc);
}

RefTrajectories campaign_trajectories(const CampaignConfig& config) {
  std::mt19937_64 rng(substream_seed(config.master_seed, kRefStreamIndex));
  return gen_initial_conditions(config.map, config.n_ref_bits, config.m_r, rng);
}

Metrics run_campaign(const CampaignConfig& config) {
  if (config.n_blocks < 1) throw std::invalid_argument("run_campaign: n_blocks must be >= 1");
  const int n_workers = resolve_workers(config);

  RefTrajectories ref;
  if (config.scheme == Scheme::AdaptiveBandwidth) ref = campaign_trajectories(config);
  const RefTrajectories* ref_ptr =
      config.scheme == Scheme::AdaptiveBandwidth ? &ref : nullptr;

  std::vector<Metrics> partials(static_cast<std::size_t>(n_workers),
                                Metrics(config.block_len, config.d_max));
  std::vector<double> block_energy(static_cast<std::size_t>(config.n_blocks), 0.0);
  std::atomic<std::uint64_t> next{0};

  const auto worker = [&](int w) {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= static_cast<std::uint64_t>(config.n_blocks)) break;
      block_energy[b] = simulate_block(config, ref_ptr, b, partials[static_cast<std::size_t>(w)]);
    }
  };

  if (n_workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  Metrics total(config.block_len, config.d_max);
  for (const auto& p : partials) total += p;
  // fixed-order reduction keeps the result independent of scheduling
  double energy = 0.0;
  for (double e : block_energy) energy += e;
  total.total_energy = energy;
  return total;
}

std::string ber_by_position_csv(const Metrics& m) {
  std::string out = "bit_index,d,errors,trials\n";
  for (int pos = 1; pos <= m.block_len; ++pos)
    for (int d = 1; d <= m.d_max; ++d) {
      const std::size_t idx = static_cast<std::size_t>(pos - 1) * m.d_max + (d - 1);
      if (m.trials[idx] == 0) continue;
      out += std::to_string(pos) + ',' + std::to_string(d) + ',' +
             std::to_string(m.errors[idx]) + ',' + std::to_string(m.trials[idx]) + '\n';
    }
  return out;
}

std::string ber_avg_csv(const Metrics& m) {
  std::string out = "d,p_err\n";
  const auto p = m.avg_ber();
  for (int d = 1; d <= m.d_max; ++d) {
    const double v = p[static_cast<std::size_t>(d - 1)];
    if (std::isnan(v)) continue;
    out += std::to_string(d) + ',' + fmt_double(v) + '\n';
  }
  return out;
}

std::string efficiency_hist_csv(const Metrics& m) {
  std::string out = "q,count\n";
  for (std::size_t q = 1; q < m.eff_hist.size(); ++q) {
    if (m.eff_hist[q] == 0) continue;
    out += std::to_string(q) + ',' + std::to_string(m.eff_hist[q]) + '\n';
  }
  return out;
}

std::string summary_json(const Metrics& m, const CampaignConfig& config) {
  nlohmann::ordered_json j;
  j["mean_d"] = m.mean_d();
  j["std_d"] = m.std_d();
  j["snr_db"] = m.snr_db(config.sigma2);
  j["residual_rate"] = m.residual_rate();
  j["released_bits"] = m.released_bits;
  j["unresolved_bits"] = m.unresolved_bits;
  j["failed_blocks"] = m.failed_blocks;
  j["master_seed"] = config.master_seed;
  j["version"] = "1.0.0";
  nlohmann::ordered_json c;
  c["scheme"] = scheme_name(config.scheme);
  c["map"] = map_name(config.map.kind);
  c["sigma2"] = config.sigma2;
  c["gamma0"] = config.gamma0;
  c["pe_res"] = config.pe_res;
  c["m_r"] = config.m_r;
  c["N"] = config.n_ref_bits;
  c["W"] = config.map.eval_width;
  c["block_len"] = config.block_len;
  c["n_blocks"] = config.n_blocks;
  c["d_max"] = config.d_max;
  c["q_max"] = config.q_max;
  c["t_flush"] = config.t_flush;
  j["config"] = c;
  return j.dump(2) + "\n";
}

LogLinearFit fit_log_ber(const std::vector<double>& avg_ber, double floor) {
  LogLinearFit fit;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < avg_ber.size(); ++i) {
    const double p = avg_ber[i];
    if (std::isnan(p) || p < floor) continue;
    pts.emplace_back(static_cast<double>(i + 1), std::log(p));
  }
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (const auto& [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace ccm
