#pragma once

// Network instances: channel matrices, noise, fronthaul budgets, rate
// targets, and the per-case strategy configuration (orders included).

#include <cstdint>
#include <string>
#include <vector>

#include "relaydual/linalg.hpp"

namespace relaydual {

// Deterministic counter-based generator: every output is a pure function of
// (seed, counter), so instances are bit-identical across platforms and runs.
// The mixer is splitmix64 applied to seed ^ golden-ratio-scrambled counter.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t next_u64();
  double next_unit();      // uniform in (0, 1), never exactly 0
  double next_gaussian();  // standard normal via Box-Muller

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct NetworkInstance {
  int num_relays = 0;  // M
  int num_users = 0;   // K
  CMatrix channel;     // M x K, entry (m,k) = gain from user k to relay m
  double noise_power = 1.0;            // sigma^2, > 0
  std::vector<double> fronthaul_caps;  // C_m in bits/symbol, > 0 each

  std::vector<cxd> user_channel(int k) const { return channel.col(k); }
  void check_invariants() const;  // throws DimensionMismatch / ParseError
};

struct RateTargets {
  std::vector<double> rates;  // R_k >= 0, bits/symbol

  static RateTargets symmetric(int num_users, double rate) {
    return RateTargets{std::vector<double>(num_users, rate)};
  }
};

enum class StrategyCase { I, II, III, IV };

const char* to_string(StrategyCase c);
StrategyCase strategy_case_from_string(const std::string& s);

bool uses_successive_decoding(StrategyCase c);   // II, IV
bool uses_wyner_ziv(StrategyCase c);             // III, IV

// Orders are stored for the uplink problem; the downlink always derives its
// encoding/compression orders by reversal, never independently.
struct StrategyConfig {
  StrategyCase case_id = StrategyCase::I;
  std::vector<int> decode_order;      // tau: position -> user (0-based)
  std::vector<int> decompress_order;  // rho: position -> relay (0-based)

  static StrategyConfig natural(StrategyCase c, int num_users, int num_relays);

  std::vector<int> downlink_encode_order() const;       // reverse of tau
  std::vector<int> downlink_compression_order() const;  // reverse of rho
  void check_invariants(int num_users, int num_relays) const;
};

bool is_permutation(const std::vector<int>& p);

// Rayleigh fading: entries i.i.d. circularly-symmetric complex Gaussian with
// unit variance (1/2 per real component). sigma^2 = 1 and C_m = 3 by default;
// override the fields afterwards if needed.
NetworkInstance generate_rayleigh(int num_relays, int num_users, uint64_t seed);

struct BeamformerReport {
  std::vector<int> unused_relays;     // sum_k |u_{k,m}|^2 <= 1e-12
  std::vector<int> non_unit_columns;  // | ||u_k||^2 - 1 | > 1e-9
  bool ok() const { return unused_relays.empty() && non_unit_columns.empty(); }
};

BeamformerReport validate_beamformers(const NetworkInstance& instance, const CMatrix& beams);

NetworkInstance load_instance(const std::string& path);
void save_instance(const NetworkInstance& instance, const std::string& path);

}  // namespace relaydual
