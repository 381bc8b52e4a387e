#include "relaydual/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "relaydual/errors.hpp"

namespace relaydual {

namespace {

uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t CounterRng::next_u64() {
  const uint64_t v = splitmix64(seed_ ^ splitmix64(counter_));
  ++counter_;
  return v;
}

double CounterRng::next_unit() {
  // 53 random bits into (0,1]; flip to avoid an exact zero under log().
  const double u = (next_u64() >> 11) * 0x1.0p-53;
  return 1.0 - u;
}

double CounterRng::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

void NetworkInstance::check_invariants() const {
  if (num_relays < 1 || num_users < 1) {
    throw DimensionMismatch("instance needs at least one relay and one user");
  }
  if (channel.rows() != num_relays || channel.cols() != num_users) {
    throw DimensionMismatch("channel matrix shape does not match (M, K)");
  }
  if (!(noise_power > 0.0)) throw ParseError("sigma2 must be positive");
  if (static_cast<int>(fronthaul_caps.size()) != num_relays) {
    throw DimensionMismatch("fronthaul capacity vector length does not match M");
  }
  for (double c : fronthaul_caps) {
    if (!(c > 0.0)) throw ParseError("fronthaul capacities must be positive");
  }
  for (int m = 0; m < num_relays; ++m) {
    for (int k = 0; k < num_users; ++k) {
      if (!std::isfinite(channel(m, k).real()) || !std::isfinite(channel(m, k).imag())) {
        throw ParseError("channel entries must be finite");
      }
    }
  }
}

const char* to_string(StrategyCase c) {
  switch (c) {
    case StrategyCase::I: return "I";
    case StrategyCase::II: return "II";
    case StrategyCase::III: return "III";
    case StrategyCase::IV: return "IV";
  }
  return "?";
}

StrategyCase strategy_case_from_string(const std::string& s) {
  if (s == "I" || s == "1") return StrategyCase::I;
  if (s == "II" || s == "2") return StrategyCase::II;
  if (s == "III" || s == "3") return StrategyCase::III;
  if (s == "IV" || s == "4") return StrategyCase::IV;
  throw ParseError("unknown strategy case '" + s + "' (expected I, II, III or IV)");
}

bool uses_successive_decoding(StrategyCase c) {
  return c == StrategyCase::II || c == StrategyCase::IV;
}

bool uses_wyner_ziv(StrategyCase c) {
  return c == StrategyCase::III || c == StrategyCase::IV;
}

bool is_permutation(const std::vector<int>& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

StrategyConfig StrategyConfig::natural(StrategyCase c, int num_users, int num_relays) {
  StrategyConfig cfg;
  cfg.case_id = c;
  cfg.decode_order.resize(num_users);
  cfg.decompress_order.resize(num_relays);
  for (int k = 0; k < num_users; ++k) cfg.decode_order[k] = k;
  for (int m = 0; m < num_relays; ++m) cfg.decompress_order[m] = m;
  return cfg;
}

std::vector<int> StrategyConfig::downlink_encode_order() const {
  return {decode_order.rbegin(), decode_order.rend()};
}

std::vector<int> StrategyConfig::downlink_compression_order() const {
  return {decompress_order.rbegin(), decompress_order.rend()};
}

void StrategyConfig::check_invariants(int num_users, int num_relays) const {
  if (static_cast<int>(decode_order.size()) != num_users || !is_permutation(decode_order)) {
    throw ParseError("decode order is not a permutation of the users");
  }
  if (static_cast<int>(decompress_order.size()) != num_relays ||
      !is_permutation(decompress_order)) {
    throw ParseError("decompress order is not a permutation of the relays");
  }
}

NetworkInstance generate_rayleigh(int num_relays, int num_users, uint64_t seed) {
  NetworkInstance inst;
  inst.num_relays = num_relays;
  inst.num_users = num_users;
  inst.channel = CMatrix(num_relays, num_users);
  inst.noise_power = 1.0;
  inst.fronthaul_caps.assign(num_relays, 3.0);

  CounterRng rng(seed);
  const double comp_std = std::sqrt(0.5);  // unit total variance per entry
  for (int m = 0; m < num_relays; ++m) {
    for (int k = 0; k < num_users; ++k) {
      const double re = comp_std * rng.next_gaussian();
      const double im = comp_std * rng.next_gaussian();
      inst.channel(m, k) = cxd(re, im);
    }
  }
  inst.check_invariants();
  return inst;
}

BeamformerReport validate_beamformers(const NetworkInstance& instance, const CMatrix& beams) {
  BeamformerReport report;
  if (beams.rows() != instance.num_relays || beams.cols() != instance.num_users) {
    throw DimensionMismatch("beamformer matrix must be M x K");
  }
  for (int m = 0; m < instance.num_relays; ++m) {
    double energy = 0.0;
    for (int k = 0; k < instance.num_users; ++k) energy += std::norm(beams(m, k));
    if (energy <= 1e-12) report.unused_relays.push_back(m);
  }
  for (int k = 0; k < instance.num_users; ++k) {
    if (std::abs(norm2(beams.col(k)) - 1.0) > 1e-9) report.non_unit_columns.push_back(k);
  }
  return report;
}

NetworkInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("instance file " + path + ": " + e.what());
  }

  NetworkInstance inst;
  try {
    inst.num_relays = j.at("M").get<int>();
    inst.num_users = j.at("K").get<int>();
    inst.noise_power = j.at("sigma2").get<double>();
    inst.fronthaul_caps = j.at("caps").get<std::vector<double>>();
    const auto& h = j.at("H");
    if (static_cast<int>(h.size()) != inst.num_relays * inst.num_users) {
      throw DimensionMismatch("instance file " + path + ": H has " +
                              std::to_string(h.size()) + " entries, expected M*K = " +
                              std::to_string(inst.num_relays * inst.num_users));
    }
    inst.channel = CMatrix(inst.num_relays, inst.num_users);
    int idx = 0;
    for (int m = 0; m < inst.num_relays; ++m) {
      for (int k = 0; k < inst.num_users; ++k, ++idx) {
        const auto& pair = h.at(idx);
        inst.channel(m, k) = cxd(pair.at(0).get<double>(), pair.at(1).get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("instance file " + path + ": " + e.what());
  }
  inst.check_invariants();
  return inst;
}

void save_instance(const NetworkInstance& instance, const std::string& path) {
  instance.check_invariants();
  nlohmann::json j;
  j["M"] = instance.num_relays;
  j["K"] = instance.num_users;
  j["sigma2"] = instance.noise_power;
  j["caps"] = instance.fronthaul_caps;
  nlohmann::json h = nlohmann::json::array();
  for (int m = 0; m < instance.num_relays; ++m) {
    for (int k = 0; k < instance.num_users; ++k) {
      h.push_back({instance.channel(m, k).real(), instance.channel(m, k).imag()});
    }
  }
  j["H"] = h;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write instance file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace relaydual
