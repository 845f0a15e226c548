#include <doctest.h>

#include <sstream>

#include "fdiscc/channels.hpp"
#include "support.hpp"

using namespace fdiscc;

namespace {

bool identical(const CMat& a, const CMat& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

bool identical(const ChannelSet& a, const ChannelSet& b) {
  if (a.h_pu.size() != b.h_pu.size() || a.g_pu.size() != b.g_pu.size()) return false;
  for (std::size_t k = 0; k < a.h_pu.size(); ++k) {
    if (!identical(a.h_pu[k], b.h_pu[k])) return false;
  }
  for (std::size_t l = 0; l < a.g_pu.size(); ++l) {
    if (!identical(a.g_pu[l], b.g_pu[l]) || !identical(a.g_au[l], b.g_au[l])) return false;
  }
  return identical(a.g_t, b.g_t) && identical(a.g_r, b.g_r) && identical(a.e_direct, b.e_direct) &&
         identical(a.h_si, b.h_si) && identical(a.a_active, b.a_active) && identical(a.a_passive, b.a_passive) &&
         identical(a.g_s, b.g_s) && a.eta_rt == b.eta_rt;
}

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("steering vector entries") {
  const CVec one = steering_vector(0.6981, 1);
  CHECK(one.size() == 1);
  CHECK(std::abs(one(0) - cd(1.0, 0.0)) < 1e-15);

  const CVec flat = steering_vector(0.0, 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(flat(i) - cd(1.0, 0.0)) < 1e-15);

  const CVec end = steering_vector(std::numbers::pi / 2.0, 3);
  CHECK(std::abs(end(0) - cd(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(end(1) - cd(-1.0, 0.0)) < 1e-12);
  CHECK(std::abs(end(2) - cd(1.0, 0.0)) < 1e-12);

  const double theta = 0.3;
  const CVec a = steering_vector(theta, 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(std::abs(a(i)) == doctest::Approx(1.0));
    CHECK(std::abs(a(i) - std::exp(cd(0.0, -std::numbers::pi * i * std::sin(theta)))) < 1e-12);
  }
  CHECK_THROWS_AS(steering_vector(0.1, 0), InvalidArgument);
}

TEST_CASE("path loss model") {
  CHECK(path_loss(1.0, 2.2) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(path_loss(2.5, 3.9, 0.02, 2.5) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(path_loss(10.0, 2.0) == doctest::Approx(1e-5).epsilon(1e-14));
  CHECK_THROWS_AS(path_loss(0.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(path_loss(-1.0, 2.0), InvalidArgument);
}

TEST_CASE("dimensions and structural invariants") {
  SystemConfig cfg = default_config();
  cfg.n_tx = 3;
  cfg.n_rx = 5;
  cfg.m_passive = 12;
  cfg.m_active = 6;
  cfg.n_cm = 3;
  cfg.n_cp = 2;
  cfg.finalize();
  const ChannelSet ch = draw_channels(cfg);
  CHECK(ch.n_tx() == 3);
  CHECK(ch.n_rx() == 5);
  CHECK(ch.m_passive() == 12);
  CHECK(ch.m_active() == 6);
  CHECK(ch.n_cm() == 3);
  CHECK(ch.n_cp() == 2);
  CHECK(ch.g_r.rows() == 12);
  CHECK(ch.g_au[1].size() == 6);
  CHECK(ch.e_direct.rows() == 2);
  CHECK(ch.e_direct.cols() == 3);
  CHECK(ch.h_si.rows() == 5);
  CHECK(ch.h_si.cols() == 3);
  CHECK(ch.g_s.rows() == 6);
  CHECK(ch.g_s.cols() == 12);

  for (int i = 0; i < ch.m_active(); ++i) CHECK(std::abs(ch.a_active(i)) == doctest::Approx(1.0));
  for (int i = 0; i < ch.m_passive(); ++i) CHECK(std::abs(ch.a_passive(i)) == doctest::Approx(1.0));
  const CMat gs = ch.eta_rt * ch.a_active * ch.a_passive.adjoint();
  CHECK((gs - ch.g_s).norm() == 0.0);
  Eigen::JacobiSVD<CMat> svd(ch.g_s);
  CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));

  for (int r = 0; r < 5; ++r)
    for (int t = 0; t < 3; ++t) CHECK(std::norm(ch.h_si(r, t)) == doctest::Approx(1e-11).epsilon(1e-12));

  for (const auto& p : ch.cm_pos) {
    CHECK(p.x >= cfg.geometry.user_x_min);
    CHECK(p.x <= cfg.geometry.user_x_max);
    CHECK(p.y >= cfg.geometry.user_y_min);
    CHECK(p.y <= cfg.geometry.user_y_max);
  }
}

TEST_CASE("same seed gives identical channels, different seeds differ") {
  SystemConfig cfg = default_config();
  cfg.seed = 42;
  const ChannelSet a = draw_channels(cfg);
  const ChannelSet b = draw_channels(cfg);
  CHECK(identical(a, b));
  cfg.seed = 43;
  const ChannelSet c = draw_channels(cfg);
  CHECK_FALSE(identical(a, c));
}

TEST_CASE("Rayleigh direct link has the path-loss variance") {
  SystemConfig cfg = default_config();
  cfg.n_tx = 1;
  cfg.n_rx = 1;
  cfg.m_passive = 1;
  cfg.m_active = 1;
  cfg.n_cm = 1;
  cfg.n_cp = 1;
  cfg.geometry.user_x_min = cfg.geometry.user_x_max = 20.0;
  cfg.geometry.user_y_min = cfg.geometry.user_y_max = 0.5;
  cfg.finalize();
  std::mt19937_64 rng(7);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::norm(draw_channels(cfg, rng).e_direct(0, 0));
  // Co-located users fall back to the reference distance.
  CHECK(sum / n == doctest::Approx(cfg.pathloss).epsilon(0.03));
}

TEST_CASE("Rician links are normalized to their path loss") {
  SystemConfig cfg = default_config();
  cfg.n_tx = 2;
  cfg.m_passive = 2;
  cfg.n_cm = 1;
  cfg.n_cp = 0;
  cfg.geometry.user_x_min = cfg.geometry.user_x_max = 30.0;
  cfg.geometry.user_y_min = cfg.geometry.user_y_max = 1.0;
  cfg.finalize();
  const auto& g = cfg.geometry;
  const double pl_br = path_loss(distance(g.bs, g.irs), cfg.exp_br, cfg.pathloss, cfg.d0_m);
  const double pl_ru = path_loss(distance(g.irs, {30.0, 1.0}), cfg.exp_ru, cfg.pathloss, cfg.d0_m);
  std::mt19937_64 rng(11);
  const int n = 20000;
  double s_br = 0.0;
  double s_ru = 0.0;
  for (int i = 0; i < n; ++i) {
    const ChannelSet ch = draw_channels(cfg, rng);
    s_br += std::norm(ch.g_t(1, 0));
    s_ru += std::norm(ch.h_pu[0](1));
  }
  CHECK(s_br / n == doctest::Approx(pl_br).epsilon(0.05));
  CHECK(s_ru / n == doctest::Approx(pl_ru).epsilon(0.05));
}

TEST_CASE("JSON dump round-trips exactly") {
  SystemConfig cfg = default_config();
  cfg.seed = 5;
  const ChannelSet a = draw_channels(cfg);
  std::stringstream io;
  write_channels(a, io);
  const ChannelSet b = read_channels(io);
  CHECK(identical(a, b));
  CHECK(b.cm_pos.size() == a.cm_pos.size());
}

}
