#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ccm/adaptive_size.hpp"

using namespace ccm;

namespace {

const MapModel kMaps[] = {{MapKind::BSM, 20}, {MapKind::Tent, 20}, {MapKind::Logistic, 20}};

double oracle_symbol(const MapModel& map, const BitPrefix& queue, double gamma0) {
  const int q = static_cast<int>(queue.size());
  const double gamma_q = gamma0 * std::ldexp(1.0, q);
  return gamma_q * (quantized_level(map, cell_index(map, queue), q) - 0.5);
}

// brute-force posterior LLRs over all 2^q transmitted bit sequences given
// the full received history (one fresh bit per step, no pruning)
std::vector<double> oracle_llrs(const MapModel& map, double gamma0, double sigma2,
                                const std::vector<double>& r) {
  const int q = static_cast<int>(r.size());
  const std::uint64_t total = 1ull << q;
  std::vector<double> metric(total, 0.0);
  for (std::uint64_t word = 0; word < total; ++word) {
    BitPrefix prefix;
    for (int n = 0; n < q; ++n) {
      prefix.push_back((word >> (q - 1 - n)) & 1);
      const double s = oracle_symbol(map, prefix, gamma0);
      metric[word] += (r[static_cast<std::size_t>(n)] - s) * (r[static_cast<std::size_t>(n)] - s);
    }
  }
  std::vector<double> llr(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) {
    double m1 = std::numeric_limits<double>::infinity();
    double m0 = m1;
    for (std::uint64_t word = 0; word < total; ++word)
      ((word >> (q - 1 - j)) & 1 ? m1 : m0) = std::min(((word >> (q - 1 - j)) & 1 ? m1 : m0),
                                                       metric[word]);
    double s1 = 0.0, s0 = 0.0;
    for (std::uint64_t word = 0; word < total; ++word) {
      if ((word >> (q - 1 - j)) & 1)
        s1 += std::exp(-(metric[word] - m1) / (2.0 * sigma2));
      else
        s0 += std::exp(-(metric[word] - m0) / (2.0 * sigma2));
    }
    llr[static_cast<std::size_t>(j)] = (std::log(s1) - m1 / (2.0 * sigma2)) -
                                       (std::log(s0) - m0 / (2.0 * sigma2));
  }
  return llr;
}

}  // namespace

TEST_CASE("encoder symbol examples") {
  const MapModel bsm{MapKind::BSM, 20};
  SizeEncoder enc(bsm, 2.0);
  CHECK(*enc.encode_step(1) == doctest::Approx(1.0).epsilon(1e-15));
  // queue now (1,1): Gamma_2 = 8, level 7/8
  CHECK(*enc.encode_step(1) == doctest::Approx(3.0).epsilon(1e-15));
  SizeEncoder enc0(bsm, 2.0);
  CHECK(*enc0.encode_step(0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("encoder overflow at q_max") {
  SizeEncoder enc({MapKind::BSM, 20}, 2.0, 3);
  CHECK(enc.encode_step(1).has_value());
  CHECK(enc.encode_step(0).has_value());
  CHECK(enc.encode_step(1).has_value());
  CHECK_FALSE(enc.encode_step(1).has_value());
  CHECK(enc.overflowed());
}

TEST_CASE("two-leaf LLR closed form") {
  const MapModel bsm{MapKind::BSM, 20};
  SizeDecoder dec(bsm, 2.0, 0.5);
  const auto& llr = dec.update(1.0, true);
  REQUIRE(llr.size() == 1);
  // symbols are +-1: ((r+1)^2 - (r-1)^2)/(2 sigma2) = 4r/(2*0.5)
  CHECK(llr[0] == doctest::Approx(4.0).epsilon(1e-12));

  SizeDecoder dec0(bsm, 2.0, 0.5);
  const auto& llr0 = dec0.update(0.0, true);
  CHECK(llr0[0] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(dec0.estimate(0) == 0);  // tie breaks to 0
}

TEST_CASE("decoder matches exhaustive ML oracle") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (const auto& map : kMaps) {
    for (int trial = 0; trial < 1000; ++trial) {
      const int q = 1 + static_cast<int>(rng() % 8);
      const double sigma2 = 0.2 + 0.6 * ((trial % 7) / 6.0);
      SizeEncoder enc(map, 2.0);
      SizeDecoder dec(map, 2.0, sigma2);
      std::vector<double> r;
      for (int n = 0; n < q; ++n) {
        const int bit = static_cast<int>(rng() & 1);
        const double s = *enc.encode_step(bit);
        r.push_back(s + std::sqrt(sigma2) * noise(rng));
        dec.update(r.back(), true);
      }
      const auto ref = oracle_llrs(map, 2.0, sigma2, r);
      REQUIRE(dec.llr().size() == ref.size());
      for (int j = 0; j < q; ++j) {
        REQUIRE(dec.llr()[static_cast<std::size_t>(j)] ==
                doctest::Approx(ref[static_cast<std::size_t>(j)]).scale(1).epsilon(1e-9));
        REQUIRE(dec.estimate(j) == (ref[static_cast<std::size_t>(j)] > 0.0 ? 1 : 0));
      }
    }
  }
}

TEST_CASE("prune releases nothing when unreliable, everything when clean") {
  const MapModel bsm{MapKind::BSM, 20};
  SizeDecoder weak(bsm, 2.0, 4.0);
  weak.update(0.05, true);
  CHECK(weak.prune().released.empty());
  CHECK(weak.pending() == 1);

  SizeEncoder enc(bsm, 2.0);
  SizeDecoder strong(bsm, 2.0, 1e-4);
  strong.update(*enc.encode_step(1), true);
  strong.update(*enc.encode_step(0), true);
  const auto rel = strong.prune();
  REQUIRE(rel.released == std::vector<std::uint8_t>{1, 0});
  CHECK(strong.pending() == 0);
}

TEST_CASE("prune releases only the reliable prefix") {
  const MapModel bsm{MapKind::BSM, 20};
  SizeDecoder dec(bsm, 2.0, 0.5);
  dec.update(1.0, true);
  for (int i = 0; i < 10; ++i) dec.update(1.0, false);  // bit 1 now very reliable
  dec.update(0.0, true);  // fresh ambiguous bit
  REQUIRE(dec.llr().size() == 2);
  const auto rel = dec.prune();
  REQUIRE(rel.released == std::vector<std::uint8_t>{1});
  CHECK(dec.pending() == 1);
}

TEST_CASE("noiseless co-simulation releases the truth for every map") {
  std::mt19937_64 rng(37);
  for (const auto& map : kMaps) {
    SizeEncoder enc(map, 2.0);
    SizeDecoder dec(map, 2.0, 1e-6);
    std::vector<int> truth;
    std::vector<int> decided;
    for (int n = 0; n < 200; ++n) {
      const int bit = static_cast<int>(rng() & 1);
      truth.push_back(bit);
      const auto s = enc.encode_step(bit);
      REQUIRE(s.has_value());
      dec.update(*s, true);
      const auto rel = dec.prune();
      for (auto b : rel.released) decided.push_back(b);
      enc.release(static_cast<int>(rel.released.size()));
      REQUIRE(enc.pending() == dec.pending());
    }
    while (dec.pending() > 0) {
      dec.update(enc.current_symbol(), false);
      const auto rel = dec.prune();
      for (auto b : rel.released) decided.push_back(b);
      enc.release(static_cast<int>(rel.released.size()));
    }
    REQUIRE(decided.size() == truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) REQUIRE(decided[i] == truth[i]);
  }
}

TEST_CASE("decisions stay causal and consistent after re-rooting") {
  // with moderate noise the released stream must still match the truth
  // almost always; any re-rooting bug derails the queues immediately
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (const auto& map : kMaps) {
    const double sigma2 = 0.25;
    SizeEncoder enc(map, 2.0);
    SizeDecoder dec(map, 2.0, sigma2);
    std::vector<int> truth, decided;
    int errors = 0;
    for (int n = 0; n < 400; ++n) {
      const int bit = static_cast<int>(rng() & 1);
      const auto s = enc.encode_step(bit);
      REQUIRE(s.has_value());
      truth.push_back(bit);
      dec.update(*s + std::sqrt(sigma2) * noise(rng), true);
      const auto rel = dec.prune();
      for (auto b : rel.released) decided.push_back(b);
      enc.release(static_cast<int>(rel.released.size()));
      REQUIRE(enc.pending() == dec.pending());
    }
    for (std::size_t i = 0; i < decided.size(); ++i)
      if (decided[i] != truth[i]) ++errors;
    CHECK(decided.size() > 300);
    CHECK(errors <= 1);
  }
}
