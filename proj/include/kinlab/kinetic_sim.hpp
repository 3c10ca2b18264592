#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinlab/noise.hpp"
#include "kinlab/random.hpp"
#include "kinlab/types.hpp"

namespace kinlab {

/// Problem description for dV = dL - sgn(V)|V|^gamma / t^beta dt - X dt, dX = V dt,
/// started from (X, V) = (x0, v0) at time t0.
struct SystemParams {
  NoiseSpec noise;
  double beta = 0.0;
  double gamma = 1.0;
  double t0 = 1.0;
  double x0 = 0.0;
  double v0 = 0.0;
  bool with_noise = true;
  bool with_friction = true;

  void validate() const;
  /// Additional hypothesis of the stable limit theorem: gamma in (0, alpha).
  void validate_stable_regime() const;
};

/// One trajectory on a time grid starting at t0.
struct PathGrid {
  std::vector<double> times;
  std::vector<Vec2> states;
};

struct EnsembleMeta {
  SystemParams params;
  double dt = 2e-2;
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 0;
  std::vector<double> requested_times;
};

/// i.i.d. samples of Z = (X, V) at one or more observation times.
struct MarginalEnsemble {
  std::vector<double> obs_times;              ///< grid times actually observed
  std::vector<std::vector<Vec2>> samples;     ///< samples[time][path]
  EnsembleMeta meta;
};

/// (0, sgn(v)|v|^gamma t^{-beta}); sgn(0) = 0.
Vec2 drift_F(double t, double v, double beta, double gamma);

/// One splitting step: e^{dt A} (state + (0, dL) - kick), where kick is
/// F(t, V) dt, tamed to F dt / (1 + dt |F|) when gamma > 1.
Vec2 step(const Vec2& state, double t, double dt, const SystemParams& params, RandomStream& rng);

/// Iterates step on a uniform grid from t0 to t_end (the last step is
/// shortened to land on t_end). Keeps every record_every-th state plus the last.
PathGrid simulate_path(const SystemParams& params, double t_end, double dt, RandomStream& rng,
                       std::size_t record_every = 1);

/// n_paths independent trajectories; path i uses RandomStream(master_seed, i).
/// Observation times are snapped to the nearest grid point. The result does
/// not depend on the thread count (0 = hardware concurrency).
MarginalEnsemble simulate_ensemble(const SystemParams& params, std::span<const double> obs_times,
                                   double dt, std::size_t n_paths, std::uint64_t master_seed,
                                   unsigned threads = 0);

/// Sample mean of ||Z||^kappa at one observation time.
double empirical_moment(const MarginalEnsemble& ens, double kappa, std::size_t time_index);

/// CSV rows `time,eps,traj,x,v` with 17 significant digits.
void write_samples_csv(const MarginalEnsemble& ens, double eps, std::ostream& out,
                       bool header = true);

}  // namespace kinlab
