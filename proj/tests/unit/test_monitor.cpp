#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "espf/errors.hpp"
#include "espf/evidence.hpp"
#include "espf/monitor.hpp"

using namespace espf;

namespace {

Points ring(double radius) {
  Points p(9, 2);
  p.row(0).setZero();
  for (int k = 0; k < 8; ++k) {
    p(k + 1, 0) = radius * std::cos(k * std::numbers::pi / 4);
    p(k + 1, 1) = radius * std::sin(k * std::numbers::pi / 4);
  }
  return p;
}

}  // namespace

TEST_CASE("regime flag") {
  CHECK(regime_flag(-17.80) == Regime::contraction);
  CHECK(regime_flag(1.94) == Regime::diffusion);
  CHECK(regime_flag(0.0) == Regime::diffusion);
  CHECK(regime_name(Regime::contraction) == "contraction");
}

TEST_CASE("necessity") {
  CHECK(necessity(SupportCloud::uniform(ring(1.0))) == 0.0);
  Points p = Points::Zero(3, 1);
  Vector v(3);
  v << 1.0, 0.01, 0.01;
  CHECK(necessity(SupportCloud(p, v)) == doctest::Approx(0.99));
}

TEST_CASE("epistemic width") {
  const CutVolumeProfile unit = cut_volume_profile(SupportCloud::uniform(ring(1.0)));
  const double ref = h_pi(unit);
  CHECK(ref == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-6));
  CHECK(epistemic_width(unit, ref) == doctest::Approx(1.0));
  const CutVolumeProfile half = cut_volume_profile(SupportCloud::uniform(ring(0.5)));
  CHECK(epistemic_width(half, ref) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("holder exponent") {
  CutVolumeProfile flat;
  flat.dim = 2;
  flat.levels = {0.25, 0.5, 1.0};
  flat.log_volumes = {1.0, 1.0, 1.0};
  flat.degenerate = {false, false, false};
  flat.weights = {0.25, 0.25, 0.5};
  CHECK(holder_exponent(flat) == doctest::Approx(0.0));

  // V_alpha proportional to (-2 log alpha)^{n/2}, n = 2.
  CutVolumeProfile g;
  g.dim = 2;
  for (int k = 1; k <= 20; ++k) {
    const double a = k / 21.0;
    g.levels.push_back(a);
    g.log_volumes.push_back(std::log(-2.0 * std::log(a)));
    g.degenerate.push_back(false);
    g.weights.push_back(1.0 / 20);
  }
  const double slope = holder_exponent(g);
  CHECK(std::isfinite(slope));
  CHECK(slope > 0.0);

  CutVolumeProfile one = flat;
  one.degenerate = {true, true, false};
  CHECK_THROWS_AS(holder_exponent(one), InsufficientLevels);
}

TEST_CASE("record assembly") {
  const SupportCloud c = SupportCloud::uniform(ring(1.0));
  const CutVolumeProfile prof = cut_volume_profile(c);
  RecordInputs in;
  in.step = 3;
  in.measured = true;
  in.log_det_mvee = -2.0;
  in.h_pre = h_pi(prof);
  in.posterior = &prof;
  in.posterior_cloud = &c;
  in.reference_h = in.h_pre;
  in.m = 9;
  in.n_target = 9;
  in.sigma = 1.0;
  const EwmRecord r = assemble_record(in);
  CHECK(r.regime == Regime::contraction);
  CHECK(r.pcrb_floor == doctest::Approx(in.h_pre));
  CHECK(r.pcrb_satisfied);
  CHECK(r.holder_min <= r.h_pi);
  CHECK(r.h_pi <= r.holder_max);
  CHECK(r.w_ep == doctest::Approx(1.0));
}
