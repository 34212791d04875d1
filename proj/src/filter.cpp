#include "espf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "espf/errors.hpp"

namespace espf {

double SigmaLaw::next(double sigma, double surprisal) const {
  const double factor = rho_c + rho_d * std::min(surprisal, s_cap);
  return std::clamp(sigma * factor, sigma_min, sigma_max);
}

Filter::Filter(FilterOptions options) : options_(std::move(options)), nodes_(generate_nodes(options_.grid)) {
  options_.vfi.validate();
  if (!(options_.sigma0 > 0.0)) throw Error("filter: sigma0 must be positive");
  if (!(options_.sigma_law.sigma_min > 0.0) || options_.sigma_law.sigma_max < options_.sigma_law.sigma_min)
    throw Error("filter: invalid sigma bounds");
  if (static_cast<int>(nodes_.rows()) < 2 * options_.grid.dim + 1)
    throw Error("filter: grid has fewer than 2n+1 nodes");
}

FilterState Filter::initial_state(const Vector& center, const Matrix& lower, double t0) const {
  Matrix map = options_.sigma0 * lower;
  if (options_.rotate_grid) map *= random_rotation(options_.grid.dim, options_.rotation_seed, 0);
  Points pts = (nodes_ * map.transpose()).rowwise() + center.transpose();
  FilterState s;
  s.cloud = SupportCloud::uniform(std::move(pts), t0);
  s.sigma = options_.sigma0;
  s.t = t0;
  return s;
}

StepOutput Filter::step(const FilterState& state, double t_next, const Propagator& propagate, const Observation* obs,
                        double reference_h, bool with_claims, std::uint64_t claims_seed) const {
  const int n = state.cloud.dim();
  const std::size_t m = state.cloud.size();

  StepOutput out;
  out.prior = SupportCloud(propagate(state.cloud.points(), state.t, t_next), state.cloud.poss(), t_next);
  const CutVolumeProfile pre = cut_volume_profile(out.prior, options_.profile);
  if (pre.all_degenerate()) throw FilterFailure("predicted cloud is fully degenerate");
  const double h_pre = h_pi(pre);
  double log_det = 0.0;
  try {
    log_det = log_det_mvee(out.prior.points(), options_.profile.mvee_tolerance);
  } catch (const DegenerateCloud&) {
    throw FilterFailure("predicted cloud lost affine rank");
  }

  RecordInputs in;
  in.step = state.step + 1;
  in.t_days = t_next / 86400.0;
  in.log_det_mvee = log_det;
  in.h_pre = h_pre;
  in.reference_h = reference_h;
  in.m = m;
  in.pcrb_slack = options_.pcrb_slack;

  if (obs == nullptr) {
    out.posterior = out.prior;
    const CutVolumeProfile post = pre;
    in.posterior = &post;
    in.posterior_cloud = &out.posterior;
    in.n_target = m;
    in.sigma = state.sigma;
    out.record = assemble_record(in);
    out.survivors.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.survivors[i] = i;
    out.state = FilterState{out.prior, state.sigma, t_next, state.step + 1};
    return out;
  }

  const Points predicted = obs->predict(out.prior.points());
  InnovationContext ctx = innovation_shape(predicted, obs->sensor_shape, options_.profile.mvee_tolerance);
  EvidenceScores ev = score_evidence(ctx, obs->y, out.prior.poss());
  const std::size_t n_target = coverage_controller(ev.info, m, n);
  const auto survivors = select_min_q(ev.q, n_target);

  bool recovered = false;
  Vector comp = ev.comp;
  SelectionResult sel;
  try {
    sel = assign_possibility(survivors, comp, out.prior.poss());
  } catch (const AllZero&) {
    // Total conflict: widen the innovation shape so that the best hypothesis
    // sits at recovery_q, and retry once. Rescaling keeps the q ranking.
    const double q_min = ev.q.minCoeff();
    const double scale = std::max(1.0, q_min / options_.recovery_q);
    ctx = innovation_context(predicted, scale * ctx.shape);
    comp = whitened_q(ctx, obs->y).comp;
    try {
      sel = assign_possibility(survivors, comp, out.prior.poss());
    } catch (const AllZero&) {
      throw FilterFailure("evidence conflict persisted after innovation inflation at step " +
                          std::to_string(state.step + 1));
    }
    recovered = true;
  }

  out.posterior = survivor_cloud(out.prior, sel);
  out.survivors = sel.survivors;
  const CutVolumeProfile post = cut_volume_profile(out.posterior, options_.profile);

  const double sigma = options_.sigma_law.next(state.sigma, ev.surprisal);
  RegenerationOptions ro;
  ro.vfi = options_.vfi;
  ro.kernel_scale = options_.kernel_scale;
  ro.mvee_tolerance = options_.profile.mvee_tolerance;
  if (options_.rotate_grid) ro.rotation = random_rotation(n, options_.rotation_seed, state.step + 1);
  Regeneration regen = regenerate(out.posterior, nodes_, sigma, ro);

  if (options_.debug_asserts) audit(out.prior, ev.q, sel, out.posterior, regen);

  in.measured = true;
  in.station = obs->station;
  in.posterior = &post;
  in.posterior_cloud = &out.posterior;
  in.n_target = n_target;
  in.prune_count = sel.prune_count;
  in.sigma = sigma;
  in.surprisal = ev.surprisal;
  in.info = ev.info;
  in.recovered = recovered;
  out.record = assemble_record(in);

  if (with_claims)
    out.claims = evaluate_claims(out.prior, ev.q, comp, n_target, claims_seed, options_.comparator_draws,
                                 options_.profile);

  out.state = FilterState{regen.cloud.with_epoch(t_next), sigma, t_next, state.step + 1};
  return out;
}

void Filter::audit(const SupportCloud& prior, const Vector& q, const SelectionResult& sel,
                   const SupportCloud& posterior, const Regeneration& regen) const {
  if (!posterior.is_normalized() || !regen.cloud.is_normalized())
    throw AdmissibilityViolation("normalization: maximum possibility is not 1");
  for (std::size_t k = 0; k < sel.survivors.size(); ++k)
    if (sel.unnormalized[static_cast<Eigen::Index>(k)] > prior.poss()[static_cast<Eigen::Index>(sel.survivors[k])])
      throw AdmissibilityViolation("conjunctive update raised a possibility");
  const VfiCheck vfi = check_vfi(Ellipsoid{Vector::Zero(regen.shape.rows()), regen.shape}, options_.vfi);
  if (vfi.lambda_min < options_.vfi.eps_min * (1.0 - 1e-9) || vfi.lambda_max > options_.vfi.lambda_max * (1.0 + 1e-9))
    throw AdmissibilityViolation("regenerated shape violates the VFI bounds");
  const std::size_t a = anchor(posterior);
  if (posterior.poss()[static_cast<Eigen::Index>(a)] != 1.0 || a >= sel.survivors.size())
    throw AdmissibilityViolation("anchor is not a survivor with possibility 1");
  std::vector<bool> in(static_cast<std::size_t>(q.size()), false);
  double worst_in = -std::numeric_limits<double>::infinity();
  for (std::size_t i : sel.survivors) {
    in[i] = true;
    worst_in = std::max(worst_in, q[static_cast<Eigen::Index>(i)]);
  }
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!in[i] && q[static_cast<Eigen::Index>(i)] < worst_in)
      throw AdmissibilityViolation("selection is not the minimum-q set");
}

}  // namespace espf
