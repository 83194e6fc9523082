#pragma once

// Euler-Maruyama for Dyson Brownian motion (type A) and the wall systems of
// type C (absorbing wall, image-charge drift) and D (reflecting wall), with
// start from the origin realized by a warm start from the entrance law.

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "dyson/random.hpp"
#include "dyson/reflecting.hpp"
#include "dyson/types.hpp"

namespace dyson {

struct SdeState {
  ProcessKind kind;
  Eigen::VectorXd x;
  double time = 0.0;
};

/// Interaction drift: sum_{j != i} 1/(x_i - x_j) for A; C adds 1/x_i and
/// sum_{j != i} 1/(x_i + x_j); D adds only the image terms.
Eigen::VectorXd dyson_drift(const ProcessKind& kind, const Eigen::VectorXd& x);

struct StepOptions {
  /// Smallest substep as a fraction of dt (default 2^-20).
  double min_fraction = 1.0 / (1 << 20);
};

/// One explicit Euler step of length dt driven by the Brownian increment `noise`.
///
/// For D the first coordinate is replaced by its absolute value after the step,
/// which realizes the local-time term. If the drift displacement at the start or at
/// the proposal exceeds half the distance to the nearest collision there, or the
/// proposal leaves the open chamber, the
/// step is split in two halves, the increment being split by a Brownian bridge
/// draw from `rng`, and retried recursively. Throws StiffnessError once a substep
/// would fall below min_fraction * dt, DomainError if `state` is outside the chamber.
SdeState step_dyson(const SdeState& state, double dt, const Eigen::VectorXd& noise, Rng& rng,
                    const StepOptions& opts = {});

/// Sample from the law at time t0 of the process started at the origin, by
/// rejection against sorted i.i.d. Gaussian (A) or half-normal (C, D)
/// proposals. Throws EnvelopeError if the acceptance rate drops below 1e-4.
OrderedConfig sample_entrance(const ProcessKind& kind, double t0, Rng& rng);

struct WarmStart {
  double kappa = 1e-3;  // warm-start time as a fraction of t_end
  int max_attempts = 64;
};

struct TrajectoryResult {
  OrderedConfig state;
  int discarded = 0;  // trajectories restarted after a StiffnessError
};

/// State at grid.t_end of the process started at the origin: entrance sample at
/// kappa * t_end, then Euler steps of grid.dt to t_end.
TrajectoryResult simulate_from_origin(const ProcessKind& kind, const TimeGrid& grid, Rng& rng,
                                      const WarmStart& warm = {});

struct SdeEnsemble {
  std::vector<Eigen::VectorXd> terminal;
  std::size_t discarded = 0;
  std::size_t trajectories = 0;

  double discard_rate() const {
    return trajectories == 0 ? 0.0 : double(discarded) / double(discarded + trajectories);
  }
  /// Coordinate `row` (0-based) of every terminal state.
  std::vector<double> coordinate(int row) const;
};

SdeEnsemble simulate_ensemble(const ProcessKind& kind, const TimeGrid& grid, std::size_t count,
                              const StreamFactory& streams, int workers,
                              const WarmStart& warm = {},
                              StreamPurpose purpose = StreamPurpose::kSde);

}  // namespace dyson
