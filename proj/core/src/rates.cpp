#include "relaydual/rates.hpp"

#include <cmath>

#include "relaydual/errors.hpp"

namespace relaydual {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double bits(double ratio) { return std::log(ratio) / kLn2; }

}  // namespace

void UplinkPoint::check_invariants(const NetworkInstance& instance) const {
  if (static_cast<int>(user_powers.size()) != instance.num_users ||
      static_cast<int>(quant_noise.size()) != instance.num_relays) {
    throw DimensionMismatch("uplink point sizes do not match the instance");
  }
  for (double p : user_powers)
    if (p < 0.0) throw ParseError("user powers must be nonnegative");
  for (double q : quant_noise)
    if (q < 0.0) throw ParseError("quantization noises must be nonnegative");
  const auto report = validate_beamformers(instance, rx_beams);
  if (!report.non_unit_columns.empty()) {
    throw ParseError("receive beamformer column is not unit norm");
  }
}

void DownlinkPoint::check_invariants(const NetworkInstance& instance,
                                     bool require_diagonal) const {
  if (static_cast<int>(user_powers.size()) != instance.num_users ||
      quant_cov.dim() != instance.num_relays) {
    throw DimensionMismatch("downlink point sizes do not match the instance");
  }
  for (double p : user_powers)
    if (p < 0.0) throw ParseError("user powers must be nonnegative");
  if (!min_eigen_psd_check(quant_cov, default_psd_tol(quant_cov) + 1e-12)) {
    throw ParseError("quantization covariance is not PSD");
  }
  if (require_diagonal) {
    for (int i = 0; i < quant_cov.dim(); ++i)
      for (int j = i + 1; j < quant_cov.dim(); ++j)
        if (quant_cov(i, j) != cxd(0.0, 0.0)) {
          throw ParseError("independent compression requires a diagonal covariance");
        }
  }
  const auto report = validate_beamformers(instance, tx_beams);
  if (!report.non_unit_columns.empty()) {
    throw ParseError("transmit beamformer column is not unit norm");
  }
}

HermitianMatrix gamma_covariance(const NetworkInstance& instance, const UplinkPoint& point,
                                 const std::vector<int>& rho) {
  const int m_count = instance.num_relays;
  HermitianMatrix gamma(m_count);
  for (int i = 0; i < m_count; ++i) {
    for (int j = i; j < m_count; ++j) {
      cxd s = 0.0;
      for (int k = 0; k < instance.num_users; ++k) {
        s += point.user_powers[k] * instance.channel(rho[i], k) *
             std::conj(instance.channel(rho[j], k));
      }
      if (i == j) s += instance.noise_power + point.quant_noise[rho[i]];
      gamma.set(i, j, s);
    }
  }
  return gamma;
}

std::vector<double> uplink_fronthaul_rates(const NetworkInstance& instance,
                                           const UplinkPoint& point, UplinkCompression mode,
                                           const std::vector<int>& rho) {
  const int m_count = instance.num_relays;
  for (int m = 0; m < m_count; ++m) {
    if (point.quant_noise[m] <= 0.0) {
      throw ZeroQuantizationNoise("relay " + std::to_string(m) +
                                  " has zero quantization noise (infinite fronthaul rate)");
    }
  }

  std::vector<double> rates(m_count, 0.0);
  if (mode == UplinkCompression::Independent) {
    for (int m = 0; m < m_count; ++m) {
      double received = instance.noise_power + point.quant_noise[m];
      for (int k = 0; k < instance.num_users; ++k) {
        received += point.user_powers[k] * std::norm(instance.channel(m, k));
      }
      rates[m] = bits(received / point.quant_noise[m]);
    }
    return rates;
  }

  // Wyner-Ziv: the relay decompressed at position j conditions on positions
  // 0..j-1, so its effective variance is the leading Schur complement of the
  // reordered covariance.
  const HermitianMatrix gamma = gamma_covariance(instance, point, rho);
  for (int j = 0; j < m_count; ++j) {
    const int relay = rho[j];
    rates[relay] = bits(schur_complement(gamma, j) / point.quant_noise[relay]);
  }
  return rates;
}

std::vector<double> uplink_user_rates(const NetworkInstance& instance, const UplinkPoint& point,
                                      UplinkDecoding mode, const std::vector<int>& tau) {
  const int k_count = instance.num_users;
  std::vector<double> rates(k_count, 0.0);

  // Beamformed quantization-plus-thermal noise floor per user.
  std::vector<double> noise_floor(k_count, 0.0);
  for (int k = 0; k < k_count; ++k) {
    double s = instance.noise_power;
    for (int m = 0; m < instance.num_relays; ++m) {
      s += point.quant_noise[m] * std::norm(point.rx_beams(m, k));
    }
    noise_floor[k] = s;
  }

  auto coupling = [&](int at_user, int from_user) {
    const cxd g = dot(point.rx_beams.col(at_user), instance.user_channel(from_user));
    return std::norm(g);
  };

  if (mode == UplinkDecoding::TreatAsNoise) {
    for (int k = 0; k < k_count; ++k) {
      double interference = 0.0;
      for (int j = 0; j < k_count; ++j) {
        if (j != k) interference += point.user_powers[j] * coupling(k, j);
      }
      const double den = interference + noise_floor[k];
      rates[k] = bits((den + point.user_powers[k] * coupling(k, k)) / den);
    }
    return rates;
  }

  // Successive cancellation: the user decoded at position k only sees the
  // not-yet-decoded users at positions > k.
  for (int pos = 0; pos < k_count; ++pos) {
    const int user = tau[pos];
    double interference = 0.0;
    for (int later = pos + 1; later < k_count; ++later) {
      interference += point.user_powers[tau[later]] * coupling(user, tau[later]);
    }
    const double den = interference + noise_floor[user];
    rates[user] = bits((den + point.user_powers[user] * coupling(user, user)) / den);
  }
  return rates;
}

std::vector<double> downlink_fronthaul_rates(const NetworkInstance& instance,
                                             const DownlinkPoint& point, DownlinkCompression mode,
                                             const std::vector<int>& rho_dl) {
  const int m_count = instance.num_relays;
  std::vector<double> rates(m_count, 0.0);

  std::vector<double> beam_power(m_count, 0.0);
  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < instance.num_users; ++k) {
      beam_power[m] += point.user_powers[k] * std::norm(point.tx_beams(m, k));
    }
  }

  if (mode == DownlinkCompression::Independent) {
    for (int m = 0; m < m_count; ++m) {
      const double q = point.quant_cov(m, m).real();
      if (q <= 0.0) {
        throw ZeroQuantizationNoise("relay " + std::to_string(m) +
                                    " has zero quantization noise (infinite fronthaul rate)");
      }
      rates[m] = bits((beam_power[m] + q) / q);
    }
    return rates;
  }

  // Multivariate: relay at position j is compressed with the already-fixed
  // signals at positions < j as context, so the denominator is the
  // conditional variance given the leading block.
  const HermitianMatrix q_ord = point.quant_cov.permuted(rho_dl);
  for (int j = 0; j < m_count; ++j) {
    const int relay = rho_dl[j];
    double denom;
    try {
      denom = schur_complement(q_ord, j);
    } catch (const NotPositiveDefinite&) {
      throw SingularConditioningBlock("relay " + std::to_string(relay) +
                                      ": conditioning block of the covariance is singular");
    }
    if (denom <= 1e-14) {
      throw SingularConditioningBlock("relay " + std::to_string(relay) +
                                      ": conditional quantization variance vanished");
    }
    rates[relay] = bits((beam_power[relay] + q_ord(j, j).real()) / denom);
  }
  return rates;
}

std::vector<double> downlink_user_rates(const NetworkInstance& instance,
                                        const DownlinkPoint& point, DownlinkEncoding mode,
                                        const std::vector<int>& tau_dl) {
  const int k_count = instance.num_users;
  std::vector<double> rates(k_count, 0.0);

  // h_k^H Q h_k: compression noise as seen by user k.
  std::vector<double> comp_noise(k_count, 0.0);
  for (int k = 0; k < k_count; ++k) {
    const auto hk = instance.user_channel(k);
    comp_noise[k] = dot(hk, matvec(point.quant_cov.matrix(), hk)).real();
  }

  auto coupling = [&](int at_user, int from_user) {
    const cxd g = dot(point.tx_beams.col(from_user), instance.user_channel(at_user));
    return std::norm(g);
  };

  if (mode == DownlinkEncoding::Linear) {
    for (int k = 0; k < k_count; ++k) {
      double interference = 0.0;
      for (int j = 0; j < k_count; ++j) {
        if (j != k) interference += point.user_powers[j] * coupling(k, j);
      }
      const double den = interference + comp_noise[k] + instance.noise_power;
      rates[k] = bits((den + point.user_powers[k] * coupling(k, k)) / den);
    }
    return rates;
  }

  // Dirty-paper coding: when user tau_dl(k) is encoded, the codewords at
  // positions < k are already fixed and get pre-cancelled; only the users
  // encoded after it remain as interference.
  for (int pos = 0; pos < k_count; ++pos) {
    const int user = tau_dl[pos];
    double interference = 0.0;
    for (int later = pos + 1; later < k_count; ++later) {
      interference += point.user_powers[tau_dl[later]] * coupling(user, tau_dl[later]);
    }
    const double den = interference + comp_noise[user] + instance.noise_power;
    rates[user] = bits((den + point.user_powers[user] * coupling(user, user)) / den);
  }
  return rates;
}

double sum_power(const UplinkPoint& point) {
  double s = 0.0;
  for (double p : point.user_powers) s += p;
  return s;
}

double sum_power(const DownlinkPoint& point) {
  double s = point.quant_cov.trace();
  for (double p : point.user_powers) s += p;
  return s;
}

}  // namespace relaydual
