#include "ccm/adaptive_bandwidth.hpp"

#include <cmath>
#include <stdexcept>

namespace ccm {

double RefTrajectories::squared_distance(int d) const {
  if (d < 0 || d > usable())
    throw std::out_of_range("squared_distance: d out of range");
  double sum = 0.0;
  const double scale = normalized ? 4.0 : 1.0;
  for (int j = 0; j < d; ++j) {
    const double diff = traj1[static_cast<std::size_t>(j)] - traj0[static_cast<std::size_t>(j)];
    sum += scale * diff * diff;
  }
  return sum;
}

RefTrajectories gen_initial_conditions(const MapModel& map, int n_bits, int m_r,
                                       std::mt19937_64& rng, bool normalized,
                                       bool force_run_limit) {
  if (n_bits <= map.eval_width)
    throw std::invalid_argument("gen_initial_conditions: n_bits must exceed eval_width");
  if (m_r < 1) throw std::invalid_argument("gen_initial_conditions: m_r must be >= 1");

  RefTrajectories ref;
  ref.map = map;
  ref.n_bits = n_bits;
  ref.m_r = m_r;
  ref.normalized = normalized;

  const bool limit_runs = force_run_limit || map.kind == MapKind::BSM;
  ref.u0.reserve(static_cast<std::size_t>(n_bits));
  std::uniform_int_distribution<int> coin(0, 1);
  int run = 0;
  std::uint8_t last = 2;
  for (int i = 0; i < n_bits; ++i) {
    auto b = static_cast<std::uint8_t>(coin(rng));
    if (limit_runs && b == last && run >= m_r) b ^= 1u;
    run = (b == last) ? run + 1 : 1;
    last = b;
    ref.u0.push_back(b);
  }
  ref.u1.resize(ref.u0.size());
  for (std::size_t i = 0; i < ref.u0.size(); ++i) ref.u1[i] = ref.u0[i] ^ 1u;

  const int usable = n_bits - map.eval_width;
  ref.traj0.resize(static_cast<std::size_t>(usable));
  ref.traj1.resize(static_cast<std::size_t>(usable));
  for (int j = 1; j <= usable; ++j) {
    ref.traj0[static_cast<std::size_t>(j - 1)] =
        trajectory_sample(map, ref.u0, static_cast<std::size_t>(j));
    ref.traj1[static_cast<std::size_t>(j - 1)] =
        trajectory_sample(map, ref.u1, static_cast<std::size_t>(j));
  }
  return ref;
}

bool BwEncoder::emit(std::vector<double>& out) {
  for (int& a : ages_) ++a;
  if (!ages_.empty() && ages_.front() > ref_->usable()) return false;
  const std::size_t q = bits_.size();
  out.resize(q);
  // component i (0-based) carries the bit of age i+1, i.e. the (i+1)-th newest
  for (std::size_t i = 0; i < q; ++i) {
    const std::size_t k = q - 1 - i;  // position in the queue (back = newest)
    out[i] = ref_->tx(bits_[k], ages_[k]);
  }
  return true;
}

bool BwEncoder::encode_step(int bit, std::vector<double>& out) {
  bits_.push_back(static_cast<std::uint8_t>(bit & 1));
  ages_.push_back(0);
  return emit(out);
}

bool BwEncoder::flush_step(std::vector<double>& out) {
  if (bits_.empty()) throw std::logic_error("BwEncoder: flush with empty queue");
  return emit(out);
}

void BwEncoder::release(int count) {
  if (count < 0 || count > pending())
    throw std::invalid_argument("BwEncoder: bad release count");
  bits_.erase(bits_.begin(), bits_.begin() + count);
  ages_.erase(ages_.begin(), ages_.begin() + count);
}

BwDecoder::BwDecoder(const RefTrajectories* ref, double sigma2, double pe_res)
    : ref_(ref), sigma2_(sigma2), llr_threshold_(std::log(1.0 / pe_res - 1.0)) {
  if (sigma2 <= 0.0) throw std::invalid_argument("BwDecoder: sigma2 must be positive");
  if (!(pe_res > 0.0 && pe_res < 0.5))
    throw std::invalid_argument("BwDecoder: pe_res must be in (0, 0.5)");
}

const std::vector<double>& BwDecoder::update(std::span<const double> r, bool new_bit) {
  if (new_bit) acc_.push_back(Acc{});
  if (r.size() != acc_.size())
    throw std::invalid_argument("BwDecoder: received vector length mismatch");
  llr_.resize(acc_.size());
  for (std::size_t i = 0; i < acc_.size(); ++i) {
    Acc& a = acc_[i];
    ++a.age;
    // components run newest-to-oldest; acc_ runs oldest-to-newest
    const double ri = r[acc_.size() - 1 - i];
    const double e0 = ri - ref_->tx(0, a.age);
    const double e1 = ri - ref_->tx(1, a.age);
    a.d0 += e0 * e0;
    a.d1 += e1 * e1;
    llr_[i] = (a.d0 - a.d1) / (2.0 * sigma2_);
  }
  return llr_;
}

BwDecoder::PruneResult BwDecoder::prune() {
  PruneResult res;
  std::size_t k = 0;
  while (k < acc_.size() && std::abs(llr_[k]) >= llr_threshold_) {
    res.released.push_back(static_cast<std::uint8_t>(estimate(static_cast<int>(k))));
    ++k;
  }
  if (k > 0) {
    acc_.erase(acc_.begin(), acc_.begin() + static_cast<std::ptrdiff_t>(k));
    llr_.erase(llr_.begin(), llr_.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return res;
}

double error_prob_exact(double dE2, double sigma2) {
  if (dE2 < 0.0 || sigma2 <= 0.0) throw std::domain_error("error_prob_exact: bad arguments");
  return 0.5 * std::erfc(std::sqrt(dE2) / (2.0 * std::sqrt(2.0 * sigma2)));
}

}  // namespace ccm
