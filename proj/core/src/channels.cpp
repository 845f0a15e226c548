#include "fdiscc/channels.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace fdiscc {

namespace {

using nlohmann::json;

class Fading {
 public:
  explicit Fading(std::mt19937_64& rng) : rng_(rng) {}

  cd cn() { return {normal_(rng_), normal_(rng_)}; }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  CVec cn_vec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = cn();
    return v;
  }
  CMat cn_mat(int r, int c) {
    CMat m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = cn();
    return m;
  }

 private:
  std::mt19937_64& rng_;
  std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

double los_angle(Point from, Point to) { return std::atan2(to.y - from.y, to.x - from.x); }

struct RicianWeights {
  double los;
  double nlos;
};

RicianWeights rician(double k_db) {
  const double k = db_to_linear(k_db);
  return {std::sqrt(k / (1.0 + k)), std::sqrt(1.0 / (1.0 + k))};
}

double link_gain(const SystemConfig& cfg, Point a, Point b, double exponent) {
  // Links shorter than the reference distance use the reference gain.
  const double d = std::max(distance(a, b), cfg.d0_m);
  return path_loss(d, exponent, cfg.pathloss, cfg.d0_m);
}

CMat rician_matrix(Fading& fd, const SystemConfig& cfg, Point tx, Point rx, int n_rx_side, int n_tx_side,
                   double exponent) {
  const auto w = rician(cfg.rician_k_db);
  const double theta = los_angle(tx, rx);
  const CMat los = steering_vector(theta, n_rx_side) * steering_vector(theta, n_tx_side).adjoint();
  const CMat nlos = fd.cn_mat(n_rx_side, n_tx_side);
  return std::sqrt(link_gain(cfg, tx, rx, exponent)) * (w.los * los + w.nlos * nlos);
}

CVec rician_vector(Fading& fd, const SystemConfig& cfg, Point tx, Point rx, int n, double exponent) {
  const auto w = rician(cfg.rician_k_db);
  const CVec los = steering_vector(los_angle(tx, rx), n);
  const CVec nlos = fd.cn_vec(n);
  return std::sqrt(link_gain(cfg, tx, rx, exponent)) * (w.los * los + w.nlos * nlos);
}

json to_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

json to_json(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

cd complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

CMat matrix_from(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>();
  const auto c = j.at("cols").get<Eigen::Index>();
  CMat m(r, c);
  const auto& data = j.at("data");
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = complex_from(data.at(i).at(k));
  return m;
}

CVec vector_from(const json& j) {
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
  return v;
}

}  // namespace

CVec steering_vector(double theta, int n) {
  if (n < 1) throw InvalidArgument("steering_vector: element count must be >= 1");
  CVec a(n);
  const double s = std::sin(theta);
  for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, -std::numbers::pi * i * s);
  return a;
}

double path_loss(double distance_m, double exponent, double reference_gain, double d0_m) {
  if (!(distance_m > 0.0)) throw InvalidArgument("path_loss: distance must be > 0");
  if (!(d0_m > 0.0)) throw InvalidArgument("path_loss: reference distance must be > 0");
  return reference_gain * std::pow(distance_m / d0_m, -exponent);
}

ChannelSet draw_channels(const SystemConfig& cfg_in, std::mt19937_64& rng) {
  SystemConfig cfg = cfg_in;
  cfg.finalize();
  cfg.validate();
  Fading fd(rng);
  const Geometry& g = cfg.geometry;
  ChannelSet ch;

  auto drop = [&] {
    return Point{fd.uniform(g.user_x_min, g.user_x_max), fd.uniform(g.user_y_min, g.user_y_max)};
  };
  for (int k = 0; k < cfg.n_cm; ++k) ch.cm_pos.push_back(drop());
  for (int l = 0; l < cfg.n_cp; ++l) ch.cp_pos.push_back(drop());

  ch.g_t = rician_matrix(fd, cfg, g.bs, g.irs, cfg.m_passive, cfg.n_tx, cfg.exp_br);
  ch.g_r = rician_matrix(fd, cfg, g.bs, g.irs, cfg.m_passive, cfg.n_rx, cfg.exp_br);
  for (int k = 0; k < cfg.n_cm; ++k) {
    ch.h_pu.push_back(rician_vector(fd, cfg, g.irs, ch.cm_pos[k], cfg.m_passive, cfg.exp_ru));
  }
  for (int l = 0; l < cfg.n_cp; ++l) {
    ch.g_pu.push_back(rician_vector(fd, cfg, ch.cp_pos[l], g.irs, cfg.m_passive, cfg.exp_ru));
    ch.g_au.push_back(rician_vector(fd, cfg, ch.cp_pos[l], g.irs, cfg.m_active, cfg.exp_ru));
  }
  ch.e_direct = CMat::Zero(cfg.n_cp, cfg.n_cm);
  for (int l = 0; l < cfg.n_cp; ++l) {
    for (int k = 0; k < cfg.n_cm; ++k) {
      ch.e_direct(l, k) = std::sqrt(link_gain(cfg, ch.cp_pos[l], ch.cm_pos[k], cfg.exp_mp)) * fd.cn();
    }
  }
  const double si_amp = std::sqrt(db_to_linear(cfg.si_power_db));
  ch.h_si = CMat(cfg.n_rx, cfg.n_tx);
  for (int t = 0; t < cfg.n_tx; ++t)
    for (int r = 0; r < cfg.n_rx; ++r) ch.h_si(r, t) = std::polar(si_amp, fd.uniform(0.0, 2.0 * std::numbers::pi));

  ch.a_active = steering_vector(g.theta_rad, cfg.m_active);
  ch.a_passive = steering_vector(g.theta_rad, cfg.m_passive);
  ch.eta_rt = cd(cfg.eta_rt, 0.0);
  ch.g_s = ch.eta_rt * ch.a_active * ch.a_passive.adjoint();
  return ch;
}

ChannelSet draw_channels(const SystemConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return draw_channels(cfg, rng);
}

void write_channels(const ChannelSet& ch, std::ostream& out) {
  json j;
  j["g_t"] = to_json(ch.g_t);
  j["g_r"] = to_json(ch.g_r);
  j["h_pu"] = json::array();
  for (const auto& v : ch.h_pu) j["h_pu"].push_back(to_json(v));
  j["g_pu"] = json::array();
  for (const auto& v : ch.g_pu) j["g_pu"].push_back(to_json(v));
  j["g_au"] = json::array();
  for (const auto& v : ch.g_au) j["g_au"].push_back(to_json(v));
  j["e_direct"] = to_json(ch.e_direct);
  j["h_si"] = to_json(ch.h_si);
  j["a_active"] = to_json(ch.a_active);
  j["a_passive"] = to_json(ch.a_passive);
  j["g_s"] = to_json(ch.g_s);
  j["eta_rt"] = {ch.eta_rt.real(), ch.eta_rt.imag()};
  auto points = [](const std::vector<Point>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back({p.x, p.y});
    return a;
  };
  j["cm_pos"] = points(ch.cm_pos);
  j["cp_pos"] = points(ch.cp_pos);
  out << j.dump() << '\n';
}

ChannelSet read_channels(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("read_channels: ") + e.what());
  }
  ChannelSet ch;
  try {
    ch.g_t = matrix_from(j.at("g_t"));
    ch.g_r = matrix_from(j.at("g_r"));
    for (const auto& v : j.at("h_pu")) ch.h_pu.push_back(vector_from(v));
    for (const auto& v : j.at("g_pu")) ch.g_pu.push_back(vector_from(v));
    for (const auto& v : j.at("g_au")) ch.g_au.push_back(vector_from(v));
    ch.e_direct = matrix_from(j.at("e_direct"));
    ch.h_si = matrix_from(j.at("h_si"));
    ch.a_active = vector_from(j.at("a_active"));
    ch.a_passive = vector_from(j.at("a_passive"));
    ch.g_s = matrix_from(j.at("g_s"));
    ch.eta_rt = complex_from(j.at("eta_rt"));
    for (const auto& p : j.at("cm_pos")) ch.cm_pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    for (const auto& p : j.at("cp_pos")) ch.cp_pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("read_channels: ") + e.what());
  }
  return ch;
}

}  // namespace fdiscc
