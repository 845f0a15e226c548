#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "fdiscc/config.hpp"
#include "fdiscc/types.hpp"

namespace fdiscc {

/// One realization of every propagation object of the scenario.
struct ChannelSet {
  CMat g_t;                 // M x N_t, BS TX -> IRS
  CMat g_r;                 // M x N_r, BS RX -> IRS
  std::vector<CVec> h_pu;   // K vectors of length M, IRS -> CM-UE k
  std::vector<CVec> g_pu;   // L vectors of length M, CP-UE l -> IRS reflecting elements
  std::vector<CVec> g_au;   // L vectors of length M_a, CP-UE l -> IRS sensing elements
  CMat e_direct;            // L x K, CP-UE l -> CM-UE k (direct, Rayleigh)
  CMat h_si;                // N_r x N_t residual self-interference
  CVec a_active;            // M_a receive steering vector toward the target
  CVec a_passive;           // M transmit steering vector toward the target
  CMat g_s;                 // M_a x M, eta_rt * a_active * a_passive^H
  cd eta_rt{0.0, 0.0};

  std::vector<Point> cm_pos;
  std::vector<Point> cp_pos;

  int n_tx() const { return static_cast<int>(g_t.cols()); }
  int n_rx() const { return static_cast<int>(g_r.cols()); }
  int m_passive() const { return static_cast<int>(g_t.rows()); }
  int m_active() const { return static_cast<int>(a_active.size()); }
  int n_cm() const { return static_cast<int>(h_pu.size()); }
  int n_cp() const { return static_cast<int>(g_pu.size()); }
};

/// Half-wavelength ULA response: entry i is exp(-j*pi*i*sin(theta)).
CVec steering_vector(double theta, int n);

/// Large-scale gain reference_gain * (d / d0)^(-exponent), linear scale.
double path_loss(double distance_m, double exponent, double reference_gain = 1e-3, double d0_m = 1.0);

/// Draws every channel under the config. Deterministic for a fixed generator state.
ChannelSet draw_channels(const SystemConfig& cfg, std::mt19937_64& rng);
/// Convenience overload seeded from cfg.seed.
ChannelSet draw_channels(const SystemConfig& cfg);

/// Text dump (JSON) with round-trip exact doubles.
void write_channels(const ChannelSet& ch, std::ostream& out);
ChannelSet read_channels(std::istream& in);

}  // namespace fdiscc
