#include "aif/belief.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

namespace aif {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

Mat4 TransitionMatrix(double dt) {
  Mat4 f = Mat4::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

// Log density of a 2-D Gaussian.
double LogGaussian2(const Vec2& residual, const Eigen::Matrix2d& cov) {
  const double det = cov.determinant();
  if (!(det > 0.0)) return kNegInf;
  const double maha = residual.dot(cov.inverse() * residual);
  return -0.5 * maha - std::log(2.0 * std::numbers::pi * std::sqrt(det));
}

GaussianBelief MakeAnchor(const Vec2& position, const BeliefConfig& config) {
  GaussianBelief g;
  g.mean << position.x(), position.y(), 0.0, 0.0;
  g.covariance.setZero();
  g.covariance.diagonal() << config.anchor_position_sigma.array().square(),
      config.anchor_velocity_sigma.array().square();
  return g;
}

}  // namespace

double Belief::ExistenceProbability() const {
  double mass = 0.0;
  for (const Particle& p : particles) {
    if (p.exists) mass += p.weight;
  }
  return mass;
}

double Belief::EffectiveSampleSize() const {
  double sq = 0.0;
  for (const Particle& p : particles) sq += p.weight * p.weight;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

double Belief::WeightSum() const {
  double sum = 0.0;
  for (const Particle& p : particles) sum += p.weight;
  return sum;
}

void BeliefConfig::Validate() const {
  if (num_particles < 1) {
    throw std::invalid_argument("belief.num_particles must be >= 1");
  }
  if (!(initial_existence >= 0.0 && initial_existence <= 1.0)) {
    throw std::invalid_argument("belief.initial_existence must lie in [0, 1]");
  }
  for (double eps : {eps_fn, eps_fp, eps_c}) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
      throw std::invalid_argument("belief likelihood epsilons must lie in [0, 1]");
    }
  }
  if (!(ess_threshold >= 0.0 && ess_threshold <= 1.0)) {
    throw std::invalid_argument("belief.ess_threshold must lie in [0, 1]");
  }
  if ((process_noise_rate.array() < 0.0).any() ||
      (measurement_std.array() <= 0.0).any()) {
    throw std::invalid_argument("belief noise parameters must be positive");
  }
  for (const Range& r : {d_act, v_target, a_cap}) {
    if (r.lo > r.hi) throw std::invalid_argument("belief prior range lo > hi");
  }
}

OcclusionFlags ComputeFlags(const Particle& particle, const Vec2& ego_position,
                            const Occluder& occluder) {
  OcclusionFlags flags;
  flags.visible =
      IsVisible(ego_position, particle.kinematics.Position(), occluder);
  flags.resolved =
      flags.visible ||
      IsVisible(ego_position, particle.anchor.Position(), occluder);
  return flags;
}

Belief InitBelief(const BeliefConfig& config, const Occluder& occluder,
                  RandomStream& rng) {
  config.Validate();
  Belief belief;
  const auto n = static_cast<std::size_t>(config.num_particles);
  belief.particles.reserve(n);
  // exact existing count, so the initial existence mass is B_0 up to 1/N
  const auto existing = static_cast<std::size_t>(
      std::llround(config.initial_existence * static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    Particle p;
    p.weight = 1.0 / static_cast<double>(n);
    p.exists = i < existing;
    const Vec2 raw(rng.Normal(config.anchor_mean.x(), config.anchor_std.x()),
                   rng.Normal(config.anchor_mean.y(), config.anchor_std.y()));
    p.anchor = MakeAnchor(occluder.Clip(raw), config);
    p.kinematics = p.anchor;
    p.hypothesis.d_act = rng.Uniform(config.d_act.lo, config.d_act.hi);
    p.hypothesis.v_target = rng.Uniform(config.v_target.lo, config.v_target.hi);
    p.hypothesis.a_cap = rng.Uniform(config.a_cap.lo, config.a_cap.hi);
    belief.particles.push_back(p);
  }
  return belief;
}

double NominalLateralControl(const BehaviorHypothesis& hypothesis,
                             double ped_x, double lateral_velocity,
                             double ego_x, double dt) {
  if (ped_x - ego_x >= hypothesis.d_act) return 0.0;
  return std::clamp((hypothesis.v_target - lateral_velocity) / dt,
                    -hypothesis.a_cap, hypothesis.a_cap);
}

PredictResult Predict(const Belief& belief, const KinematicState& ego,
                      const WorldModel& world, const BeliefConfig& config) {
  const double dt = world.dt;
  const Mat4 f = TransitionMatrix(dt);
  Mat4 q = Mat4::Zero();
  q.diagonal() = config.process_noise_rate * dt;

  PredictResult out;
  out.prior = belief;
  out.flags.resize(belief.particles.size());
  for (std::size_t i = 0; i < out.prior.particles.size(); ++i) {
    Particle& p = out.prior.particles[i];
    if (p.exists) {
      GaussianBelief& k = p.kinematics;
      const double u = NominalLateralControl(p.hypothesis, k.mean(0), k.mean(3),
                                             ego.position.x(), dt);
      // semi-implicit: v' = v + u dt, x' = x + v' dt
      k.mean = f * k.mean;
      k.mean(1) += u * dt * dt;
      k.mean(3) += u * dt;
      k.covariance = f * k.covariance * f.transpose() + q;
    }
    out.flags[i] = ComputeFlags(p, ego.position, world.occluder);
  }
  return out;
}

Particle ConditionalReset(const Particle& prior, bool observed, bool resolved) {
  Particle out = prior;
  if (!observed && !resolved) out.kinematics = prior.anchor;
  return out;
}

ReweightResult Reweight(const std::vector<Particle>& particles,
                        const Observation& obs,
                        const std::vector<OcclusionFlags>& flags,
                        const KinematicState& ego, const WorldModel& world,
                        const BeliefConfig& config) {
  const std::size_t n = particles.size();
  std::vector<double> log_lik(n, 0.0);
  const bool observed = obs.ped_visible && obs.ped_position.has_value();

  // Detection likelihood P_exist(o_p | z, o_r').
  for (std::size_t i = 0; i < n; ++i) {
    const bool exists = particles[i].exists;
    if (observed) {
      log_lik[i] = exists ? SafeLog(1.0 - config.eps_fn) : SafeLog(config.eps_fn);
    } else if (flags[i].resolved) {
      log_lik[i] = exists ? SafeLog(config.eps_fp) : SafeLog(1.0 - config.eps_fp);
    }
  }

  if (observed) {
    const Vec2 z = *obs.ped_position;
    const Eigen::Matrix2d r =
        config.measurement_std.array().square().matrix().asDiagonal();
    const Vec2 heading = EgoHeading(ego.velocity);
    const double log_c_agree = SafeLog(1.0 - config.eps_c);
    const double log_c_disagree = SafeLog(config.eps_c);

    // Measurement density per existing particle, plus the marginal density
    // under the existence hypothesis, which scores the non-existing ones.
    std::vector<double> log_density(n, kNegInf);
    double log_marginal = kNegInf;
    double existing_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Particle& p = particles[i];
      if (!p.exists) continue;
      const Eigen::Matrix2d s = p.kinematics.covariance.topLeftCorner<2, 2>() + r;
      log_density[i] = LogGaussian2(z - p.kinematics.Position(), s);
      if (p.weight > 0.0) {
        const double term = std::log(p.weight) + log_density[i];
        if (term > kNegInf) {
          const double hi = std::max(log_marginal, term);
          log_marginal = hi + std::log(std::exp(log_marginal - hi) +
                                       std::exp(term - hi));
        }
        existing_mass += p.weight;
      }
    }
    log_marginal = existing_mass > 0.0
                       ? log_marginal - std::log(existing_mass)
                       : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      const Particle& p = particles[i];
      const bool overlap =
          p.exists && FootprintDistance(ego.position, heading,
                                        p.kinematics.Position(),
                                        world.collision) < world.collision.radius;
      const double log_coll =
          overlap == obs.collision ? log_c_agree : log_c_disagree;
      log_lik[i] += (p.exists ? log_density[i] : log_marginal) + log_coll;
    }
  }

  ReweightResult out;
  out.weights.resize(n);
  double lo = std::numeric_limits<double>::infinity();
  double hi = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (particles[i].weight <= 0.0) continue;
    lo = std::min(lo, log_lik[i]);
    hi = std::max(hi, log_lik[i]);
  }

  if (lo == hi && hi > kNegInf) {
    // uninformative: keep the prior weights bit-for-bit
    for (std::size_t i = 0; i < n; ++i) out.weights[i] = particles[i].weight;
    return out;
  }

  double sum = 0.0;
  if (hi > kNegInf) {
    for (std::size_t i = 0; i < n; ++i) {
      out.weights[i] = particles[i].weight * std::exp(log_lik[i] - hi);
      sum += out.weights[i];
    }
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    spdlog::warn("belief reweight: all likelihoods vanished, resetting weights");
    std::fill(out.weights.begin(), out.weights.end(),
              1.0 / static_cast<double>(n));
    out.degenerate = true;
    return out;
  }
  for (double& w : out.weights) w /= sum;
  return out;
}

Particle KfCorrect(const Particle& particle, const Vec2& measurement,
                   const Eigen::Matrix2d& measurement_cov) {
  Particle out = particle;
  GaussianBelief& k = out.kinematics;
  const Eigen::Matrix2d s =
      k.covariance.topLeftCorner<2, 2>() + measurement_cov;
  const Eigen::Matrix<double, 4, 2> gain =
      k.covariance.leftCols<2>() * s.inverse();
  k.mean += gain * (measurement - k.Position());

  // Joseph form
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Mat4 i_kh = Mat4::Identity() - gain * h;
  Mat4 p = i_kh * k.covariance * i_kh.transpose() +
           gain * measurement_cov * gain.transpose();
  p = 0.5 * (p + p.transpose());

  if (Eigen::LLT<Mat4>(p).info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat4> eig(p);
    if (eig.eigenvalues().minCoeff() < -1e-9) {
      spdlog::warn("kalman update produced a non-PSD covariance, repairing");
      const Vec4 floored = eig.eigenvalues().cwiseMax(0.0);
      p = eig.eigenvectors() * floored.asDiagonal() *
          eig.eigenvectors().transpose();
      p = 0.5 * (p + p.transpose());
    }
  }
  k.covariance = p;
  return out;
}

std::vector<std::size_t> SystematicResampleIndices(
    const std::vector<double>& weights, std::size_t count, double u) {
  std::vector<std::size_t> idx;
  idx.reserve(count);
  if (weights.empty() || count == 0) return idx;
  double total = 0.0;
  for (double w : weights) total += w;

  double cumulative = weights[0] / total;
  std::size_t j = 0;
  const double step = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double position = (u + static_cast<double>(i)) * step;
    while (position >= cumulative && j + 1 < weights.size()) {
      ++j;
      cumulative += weights[j] / total;
    }
    idx.push_back(j);
  }
  return idx;
}

Belief SystematicResample(const Belief& belief, double ess_threshold,
                          RandomStream& rng) {
  const std::size_t n = belief.particles.size();
  if (n == 0) return belief;
  if (belief.EffectiveSampleSize() >= ess_threshold * static_cast<double>(n)) {
    return belief;
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = belief.particles[i].weight;
  const auto idx = SystematicResampleIndices(weights, n, rng.Uniform(0.0, 1.0));

  Belief out;
  out.step = belief.step;
  out.particles.reserve(n);
  for (std::size_t i : idx) {
    Particle p = belief.particles[i];
    p.weight = 1.0 / static_cast<double>(n);
    out.particles.push_back(p);
  }
  return out;
}

Belief UpdateBelief(const Belief& belief, const Observation& obs,
                    const KinematicState& ego, const WorldModel& world,
                    const BeliefConfig& config, RandomStream& rng) {
  PredictResult predicted = Predict(belief, ego, world, config);
  Belief& b = predicted.prior;
  const bool observed = obs.ped_visible && obs.ped_position.has_value();

  std::vector<OcclusionFlags>& flags = predicted.flags;
  if (config.conditional_reset) {
    for (std::size_t i = 0; i < b.particles.size(); ++i) {
      const bool was_reset = !observed && !flags[i].resolved;
      b.particles[i] =
          ConditionalReset(b.particles[i], observed, flags[i].resolved);
      if (was_reset) {
        flags[i] = ComputeFlags(b.particles[i], ego.position, world.occluder);
      }
    }
  }

  const ReweightResult rw = Reweight(b.particles, obs, flags, ego, world, config);
  for (std::size_t i = 0; i < b.particles.size(); ++i) {
    b.particles[i].weight = rw.weights[i];
  }

  if (observed) {
    const Eigen::Matrix2d r =
        config.measurement_std.array().square().matrix().asDiagonal();
    for (Particle& p : b.particles) {
      if (p.exists) p = KfCorrect(p, *obs.ped_position, r);
    }
  }

  Belief out = SystematicResample(b, config.ess_threshold, rng);
  out.step = belief.step + 1;
  return out;
}

BeliefSummary Summarize(const Belief& belief) {
  BeliefSummary s;
  s.existence = belief.ExistenceProbability();
  s.effective_sample_size = belief.EffectiveSampleSize();
  if (s.existence > 0.0) {
    for (const Particle& p : belief.particles) {
      if (!p.exists) continue;
      s.mean_position += p.weight * p.kinematics.Position();
      s.covariance_trace += p.weight * p.kinematics.covariance.trace();
    }
    s.mean_position /= s.existence;
    s.covariance_trace /= s.existence;
  }
  return s;
}

}  // namespace aif
