#include "espf/monitor.hpp"

#include <cmath>
#include <limits>

#include "espf/errors.hpp"
#include "espf/evidence.hpp"

namespace espf {

std::string_view regime_name(Regime r) noexcept { return r == Regime::contraction ? "contraction" : "diffusion"; }

Regime regime_flag(double log_det) {
  if (std::isnan(log_det)) throw Error("regime_flag: log det is NaN");
  return log_det < 0.0 ? Regime::contraction : Regime::diffusion;
}

double necessity(const SupportCloud& c) {
  if (c.size() < 2) throw Error("necessity: need at least two hypotheses");
  double first = -1.0;
  double second = -1.0;
  for (Eigen::Index i = 0; i < c.poss().size(); ++i) {
    const double p = c.poss()[i];
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return 1.0 - second;
}

double epistemic_width(const CutVolumeProfile& profile, double reference) {
  if (profile.all_degenerate()) return 0.0;
  return std::exp((h_pi(profile) - reference) / static_cast<double>(profile.dim));
}

double holder_exponent(const CutVolumeProfile& profile) {
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < profile.levels.size(); ++k) {
    if (profile.degenerate[k]) continue;
    const double x = -std::log(profile.levels[k]);
    const double y = profile.log_volumes[k];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw InsufficientLevels("holder_exponent: fewer than two non-degenerate levels");
  const double c = static_cast<double>(count);
  const double den = c * sxx - sx * sx;
  if (!(den > 0.0)) return 0.0;
  return (c * sxy - sx * sy) / den;
}

EwmRecord assemble_record(const RecordInputs& in) {
  if (in.posterior == nullptr || in.posterior_cloud == nullptr) throw Error("assemble_record: missing posterior");
  EwmRecord r;
  r.step = in.step;
  r.t_days = in.t_days;
  r.measured = in.measured;
  r.station = in.station;
  r.log_det_mvee = in.log_det_mvee;
  r.regime = regime_flag(in.log_det_mvee);
  r.h_pre = in.h_pre;
  if (in.posterior->all_degenerate()) {
    r.h_pi = r.holder_min = r.holder_max = in.posterior->degenerate_floor;
  } else {
    r.h_pi = h_pi(*in.posterior);
    r.holder_min = holder_mean(*in.posterior, -std::numeric_limits<double>::infinity());
    r.holder_max = holder_mean(*in.posterior, std::numeric_limits<double>::infinity());
  }
  r.w_ep = epistemic_width(*in.posterior, in.reference_h);
  r.m = in.m;
  r.n_target = in.n_target;
  r.prune_count = in.prune_count;
  r.sigma = in.sigma;
  r.necessity = necessity(*in.posterior_cloud);
  r.surprisal = in.surprisal;
  r.info = in.info;
  try {
    r.alpha_c = holder_exponent(*in.posterior);
  } catch (const InsufficientLevels&) {
    r.alpha_c = std::numeric_limits<double>::quiet_NaN();
  }
  r.pcrb_floor = pcrb_floor(in.h_pre, in.info, in.posterior->dim);
  r.pcrb_satisfied = r.h_pi >= r.pcrb_floor - in.pcrb_slack;
  r.recovered = in.recovered;
  return r;
}

}  // namespace espf
