#include "dyson/dyson_sde.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "dyson/determinantal.hpp"
#include "dyson/parallel.hpp"

namespace dyson {

namespace {

// Distance to the nearest collision: neighbouring gaps, and x_1 itself for C.
double collision_gap(const ProcessKind& kind, const Eigen::VectorXd& x) {
  double gap = kind.family == Family::C ? x(0) : INFINITY;
  for (Eigen::Index i = 1; i < x.size(); ++i) gap = std::min(gap, x(i) - x(i - 1));
  return gap;
}

bool drift_resolved(const ProcessKind& kind, const Eigen::VectorXd& displacement, const Eigen::VectorXd& x) {
  return displacement.cwiseAbs().maxCoeff() <= 0.5 * collision_gap(kind, x);
}

SdeState advance(const SdeState& s, double dt, const Eigen::VectorXd& noise, Rng& rng,
                 double min_dt, int depth) {
  const Eigen::VectorXd drift = dt * dyson_drift(s.kind, s.x);
  Eigen::VectorXd proposal = s.x + drift + noise;
  if (s.kind.family == Family::D) proposal(0) = std::abs(proposal(0));
  if (drift_resolved(s.kind, drift, s.x) && proposal.allFinite() && in_chamber(s.kind, proposal) &&
      drift_resolved(s.kind, dt * dyson_drift(s.kind, proposal), proposal))
    return SdeState{s.kind, std::move(proposal), s.time + dt};

  const double half = dt / 2;
  if (half < min_dt)
    throw StiffnessError("step_dyson: substep fell below dt_min at depth " + std::to_string(depth));
  // Brownian bridge split of the increment over [0, dt].
  Eigen::VectorXd first(noise.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i)
    first(i) = noise(i) / 2 + std::sqrt(dt) / 2 * standard_normal(rng);
  const Eigen::VectorXd second = noise - first;
  const SdeState mid = advance(s, half, first, rng, min_dt, depth + 1);
  return advance(mid, half, second, rng, min_dt, depth + 1);
}

// Rejection envelope for the entrance law at t = 1.
struct Envelope {
  bool whole_line = false;
  double scale = 1.5;
  double bound = 1.0;  // sup f / g, padded
};

double log_envelope(const Envelope& env, const Eigen::VectorXd& x) {
  const double d = double(x.size());
  double log_g = std::lgamma(d + 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z = x(i) / env.scale;
    log_g += -0.5 * z * z - std::log(env.scale * std::sqrt(2 * std::numbers::pi));
    if (!env.whole_line) log_g += std::log(2.0);
  }
  return log_g;
}

Eigen::VectorXd propose(const Envelope& env, int d, Rng& rng) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) {
    const double z = env.scale * standard_normal(rng);
    x(i) = env.whole_line ? z : std::abs(z);
  }
  std::sort(x.data(), x.data() + d);
  return x;
}

const Envelope& envelope_for(const ProcessKind& kind) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, Envelope> cache;
  const std::pair<int, int> key{int(kind.family), kind.size};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Envelope env;
  env.whole_line = kind.family == Family::A;
  const EntranceSpec spec = EntranceSpec::dyson(kind);
  Rng rng = StreamFactory(0x656e76ULL).stream(StreamPurpose::kCalibration, std::uint64_t(kind.size));
  double sup = 0.0;
  for (int k = 0; k < 50000; ++k) {
    const Eigen::VectorXd x = propose(env, kind.size, rng);
    if (!in_chamber(kind, x)) continue;
    sup = std::max(sup, entrance_density_raw(spec, x) / std::exp(log_envelope(env, x)));
  }
  env.bound = 1.5 * sup;
  if (!(env.bound > 0) || 1.0 / env.bound < 1e-4)
    throw EnvelopeError("sample_entrance: envelope acceptance below 1e-4 for " + to_string(kind));
  std::lock_guard lock(mutex);
  return cache.emplace(key, env).first->second;
}

}  // namespace

Eigen::VectorXd dyson_drift(const ProcessKind& kind, const Eigen::VectorXd& x) {
  const Eigen::Index m = x.size();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (kind.family == Family::C) b(i) += 1.0 / x(i);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      b(i) += 1.0 / (x(i) - x(j));
      if (kind.family != Family::A) b(i) += 1.0 / (x(i) + x(j));
    }
  }
  return b;
}

SdeState step_dyson(const SdeState& state, double dt, const Eigen::VectorXd& noise, Rng& rng,
                    const StepOptions& opts) {
  if (!(dt > 0)) throw DomainError("step_dyson: dt must be positive");
  if (noise.size() != state.kind.size || state.x.size() != state.kind.size)
    throw ShapeError("step_dyson: dimension mismatch");
  if (!in_chamber(state.kind, state.x)) throw DomainError("step_dyson: state outside the chamber");
  return advance(state, dt, noise, rng, dt * opts.min_fraction, 0);
}

OrderedConfig sample_entrance(const ProcessKind& kind, double t0, Rng& rng) {
  if (!(t0 > 0)) throw DomainError("sample_entrance: t0 must be positive");
  const Envelope& env = envelope_for(kind);
  const EntranceSpec spec = EntranceSpec::dyson(kind);
  const double s = std::sqrt(t0);
  constexpr int kMaxAttempts = 1000000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Eigen::VectorXd x = propose(env, kind.size, rng);
    const double u = uniform01(rng);
    if (!in_chamber(kind, x)) continue;
    const double f = entrance_density_raw(spec, x);
    if (u * env.bound * std::exp(log_envelope(env, x)) <= f)
      return OrderedConfig{kind, s * x};
  }
  throw EnvelopeError("sample_entrance: no acceptance in 1e6 proposals");
}

TrajectoryResult simulate_from_origin(const ProcessKind& kind, const TimeGrid& grid, Rng& rng,
                                      const WarmStart& warm) {
  const double t_end = grid.t_end;
  const double t0 = warm.kappa * t_end;
  const double dt = grid.dt();
  const int m = kind.size;
  int discarded = 0;
  for (int attempt = 0; attempt < warm.max_attempts; ++attempt) {
    SdeState state{kind, sample_entrance(kind, t0, rng).x, t0};
    try {
      Eigen::VectorXd noise(m);
      while (state.time < t_end) {
        const double h = std::min(dt, t_end - state.time);
        if (h <= 1e-14 * t_end) break;
        for (int i = 0; i < m; ++i) noise(i) = std::sqrt(h) * standard_normal(rng);
        const double target = state.time + h;
        state = step_dyson(state, h, noise, rng);
        state.time = target;
      }
      return TrajectoryResult{OrderedConfig{kind, state.x}, discarded};
    } catch (const StiffnessError&) {
      ++discarded;
    }
  }
  throw StiffnessError("simulate_from_origin: every attempt hit the substep floor");
}

std::vector<double> SdeEnsemble::coordinate(int row) const {
  std::vector<double> out;
  out.reserve(terminal.size());
  for (const auto& x : terminal) out.push_back(x(row));
  return out;
}

SdeEnsemble simulate_ensemble(const ProcessKind& kind, const TimeGrid& grid, std::size_t count,
                              const StreamFactory& streams, int workers, const WarmStart& warm,
                              StreamPurpose purpose) {
  envelope_for(kind);  // fill the cache before the workers start
  auto results = parallel_map<TrajectoryResult>(count, workers, [&](std::size_t i) {
    Rng rng = streams.stream(purpose, i);
    return simulate_from_origin(kind, grid, rng, warm);
  });
  SdeEnsemble out;
  out.trajectories = count;
  out.terminal.reserve(count);
  for (auto& r : results) {
    out.discarded += std::size_t(r.discarded);
    out.terminal.push_back(std::move(r.state.x));
  }
  return out;
}

}  // namespace dyson
