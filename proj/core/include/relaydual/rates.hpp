#pragma once

// Achievable-rate and fronthaul-rate formulas for both link directions and
// all four strategy cases. Pure functions; logs are accumulated in natural
// base and converted to bits once at the end.

#include <vector>

#include "relaydual/linalg.hpp"
#include "relaydual/network.hpp"

namespace relaydual {

enum class UplinkCompression { Independent, WynerZiv };
enum class UplinkDecoding { TreatAsNoise, Successive };
enum class DownlinkCompression { Independent, Multivariate };
enum class DownlinkEncoding { Linear, DirtyPaper };

struct UplinkPoint {
  std::vector<double> user_powers;  // p_k >= 0
  std::vector<double> quant_noise;  // q_m >= 0
  CMatrix rx_beams;                 // M x K, unit-norm columns w_k

  void check_invariants(const NetworkInstance& instance) const;
};

struct DownlinkPoint {
  std::vector<double> user_powers;               // p_k >= 0
  HermitianMatrix quant_cov = HermitianMatrix(1);  // M x M PSD; diagonal in Cases I-II
  CMatrix tx_beams;                              // M x K, unit-norm columns v_k

  void check_invariants(const NetworkInstance& instance, bool require_diagonal) const;
};

// Covariance of the compressed uplink receive vector reordered by rho:
// Gamma(i,j) = sum_k p_k h_{rho(i),k} conj(h_{rho(j),k}) + sigma^2 I + diag(q_rho).
HermitianMatrix gamma_covariance(const NetworkInstance& instance, const UplinkPoint& point,
                                 const std::vector<int>& rho);

// Fronthaul rates indexed by physical relay id (rho only reorders the
// Wyner-Ziv side information, never the output slots).
std::vector<double> uplink_fronthaul_rates(const NetworkInstance& instance,
                                           const UplinkPoint& point, UplinkCompression mode,
                                           const std::vector<int>& rho);

std::vector<double> uplink_user_rates(const NetworkInstance& instance, const UplinkPoint& point,
                                      UplinkDecoding mode, const std::vector<int>& tau);

// For Multivariate mode, rho_dl is the compression order; the relay at
// position j conditions on the relays compressed before it (positions < j).
std::vector<double> downlink_fronthaul_rates(const NetworkInstance& instance,
                                             const DownlinkPoint& point, DownlinkCompression mode,
                                             const std::vector<int>& rho_dl);

// For DirtyPaper mode, tau_dl is the encoding order; the user at position k
// is interfered only by users encoded after it (their codewords are not yet
// fixed when user tau_dl(k) is encoded, so they cannot be pre-cancelled).
std::vector<double> downlink_user_rates(const NetworkInstance& instance,
                                        const DownlinkPoint& point, DownlinkEncoding mode,
                                        const std::vector<int>& tau_dl);

double sum_power(const UplinkPoint& point);
double sum_power(const DownlinkPoint& point);  // sum_k p_k + tr(Q)

}  // namespace relaydual
