#include "kinlab/kinetic_sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "kinlab/error.hpp"
#include "parallel.hpp"

namespace kinlab {

void SystemParams::validate() const {
  noise.validate();
  require(beta >= 0.0 && std::isfinite(beta), ErrorCode::parameter, "beta must be >= 0");
  require(gamma >= 0.0 && std::isfinite(gamma), ErrorCode::parameter, "gamma must be >= 0");
  require(t0 > 0.0 && std::isfinite(t0), ErrorCode::parameter,
          "t0 must be positive (friction t^-beta is singular at 0)");
  require(std::isfinite(x0) && std::isfinite(v0), ErrorCode::parameter,
          "initial state must be finite");
}

void SystemParams::validate_stable_regime() const {
  validate();
  if (!noise.is_brownian()) {
    require(gamma > 0.0 && gamma < noise.alpha, ErrorCode::parameter,
            "stable limit theorems need gamma in (0, alpha)");
  }
}

Vec2 drift_F(double t, double v, double beta, double gamma) {
  require(t > 0.0, ErrorCode::parameter, "drift_F needs t > 0");
  if (v == 0.0) return Vec2::Zero();
  const double mag = (gamma == 1.0 ? std::abs(v) : std::pow(std::abs(v), gamma)) * std::pow(t, -beta);
  return Vec2(0.0, v > 0.0 ? mag : -mag);
}

namespace {

/// Per-step constants shared by all trajectories of one run.
class StepKernel {
public:
  StepKernel(const SystemParams& p, double dt)
      : p_(p),
        dt_(dt),
        cos_(std::cos(dt)),
        sin_(std::sin(dt)),
        noise_scale_(p.noise.is_brownian() ? std::sqrt(dt)
                                           : std::pow(p.noise.a * dt, 1.0 / p.noise.alpha)) {}

  /// friction_weight is t^{-beta} at the left end of the step.
  Vec2 advance(const Vec2& z, double friction_weight, RandomStream& rng) const {
    double x = z.x();
    double v = z.y();
    double kick = 0.0;
    if (p_.with_friction && v != 0.0) {
      const double mag =
          (p_.gamma == 1.0 ? std::abs(v) : std::pow(std::abs(v), p_.gamma)) * friction_weight;
      kick = mag * dt_;
      if (p_.gamma > 1.0) kick /= 1.0 + dt_ * mag;
      if (v < 0.0) kick = -kick;
    }
    v -= kick;
    if (p_.with_noise) {
      v += noise_scale_ * (p_.noise.is_brownian() ? rng.normal()
                                                  : standard_stable_sample(p_.noise.alpha, rng));
    }
    // e^{dt A} = [[cos, sin], [-sin, cos]]
    return Vec2(cos_ * x + sin_ * v, -sin_ * x + cos_ * v);
  }

  Vec2 advance_partial(const Vec2& z, double t, double dt, RandomStream& rng) const {
    if (dt == dt_) return advance(z, std::pow(t, -p_.beta), rng);
    return StepKernel(p_, dt).advance(z, std::pow(t, -p_.beta), rng);
  }

private:
  SystemParams p_;
  double dt_;
  double cos_;
  double sin_;
  double noise_scale_;
};

void check_finite(const Vec2& z, double t) {
  if (!std::isfinite(z.x()) || !std::isfinite(z.y())) {
    fail(ErrorCode::propagation, "non-finite state at t = " + std::to_string(t));
  }
}

}  // namespace

Vec2 step(const Vec2& state, double t, double dt, const SystemParams& params, RandomStream& rng) {
  require(dt > 0.0, ErrorCode::parameter, "step needs dt > 0");
  require(t >= params.t0 * (1.0 - 1e-12), ErrorCode::parameter, "step needs t >= t0");
  check_finite(state, t);
  return StepKernel(params, dt).advance(state, std::pow(t, -params.beta), rng);
}

PathGrid simulate_path(const SystemParams& params, double t_end, double dt, RandomStream& rng,
                       std::size_t record_every) {
  params.validate();
  require(t_end > params.t0, ErrorCode::parameter, "simulate_path needs t_end > t0");
  require(dt > 0.0 && dt <= t_end - params.t0 + 1e-12, ErrorCode::parameter,
          "dt must lie in (0, t_end - t0]");
  require(record_every >= 1, ErrorCode::parameter, "record_every must be >= 1");

  const StepKernel kernel(params, dt);
  const double span = t_end - params.t0;
  auto full_steps = static_cast<std::size_t>(std::floor(span / dt + 1e-9));
  const double remainder = span - static_cast<double>(full_steps) * dt;
  const bool partial = remainder > 1e-12 * std::max(1.0, t_end);

  PathGrid path;
  path.times.push_back(params.t0);
  path.states.emplace_back(params.x0, params.v0);
  Vec2 z(params.x0, params.v0);
  for (std::size_t k = 0; k < full_steps; ++k) {
    const double t = params.t0 + static_cast<double>(k) * dt;
    z = kernel.advance(z, std::pow(t, -params.beta), rng);
    const double t_next = params.t0 + static_cast<double>(k + 1) * dt;
    check_finite(z, t_next);
    if ((k + 1) % record_every == 0 || (k + 1 == full_steps && !partial)) {
      path.times.push_back(k + 1 == full_steps && !partial ? t_end : t_next);
      path.states.push_back(z);
    }
  }
  if (partial) {
    const double t = params.t0 + static_cast<double>(full_steps) * dt;
    z = kernel.advance_partial(z, t, remainder, rng);
    check_finite(z, t_end);
    path.times.push_back(t_end);
    path.states.push_back(z);
  }
  return path;
}

MarginalEnsemble simulate_ensemble(const SystemParams& params, std::span<const double> obs_times,
                                   double dt, std::size_t n_paths, std::uint64_t master_seed,
                                   unsigned threads) {
  params.validate();
  require(dt > 0.0, ErrorCode::parameter, "dt must be positive");
  require(n_paths >= 1, ErrorCode::parameter, "n_paths must be >= 1");
  require(!obs_times.empty(), ErrorCode::parameter, "at least one observation time is needed");

  MarginalEnsemble ens;
  ens.meta = {params, dt, master_seed, n_paths, {obs_times.begin(), obs_times.end()}};
  std::vector<std::size_t> obs_steps;
  double previous = params.t0;
  for (const double t : obs_times) {
    require(t > previous, ErrorCode::parameter,
            "observation times must be increasing and greater than t0");
    previous = t;
    const auto k = static_cast<std::size_t>(std::llround((t - params.t0) / dt));
    require(k >= 1, ErrorCode::parameter, "observation time closer to t0 than half a step");
    require(obs_steps.empty() || k > obs_steps.back(), ErrorCode::parameter,
            "two observation times snap to the same grid point");
    obs_steps.push_back(k);
    ens.obs_times.push_back(params.t0 + static_cast<double>(k) * dt);
  }
  const std::size_t n_steps = obs_steps.back();

  std::vector<double> friction_weight(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    friction_weight[k] = std::pow(params.t0 + static_cast<double>(k) * dt, -params.beta);
  }

  ens.samples.assign(obs_steps.size(), std::vector<Vec2>(n_paths, Vec2::Zero()));
  const StepKernel kernel(params, dt);
  const unsigned workers = detail::resolve_threads(threads, n_paths);
  std::vector<std::vector<std::string>> failures(workers);

  detail::parallel_chunks(n_paths, workers, [&](unsigned worker, std::size_t begin, std::size_t end) {
    for (std::size_t path = begin; path < end; ++path) {
      RandomStream rng(master_seed, path, stream_purpose::trajectory);
      Vec2 z(params.x0, params.v0);
      std::size_t next_obs = 0;
      for (std::size_t k = 0; k < n_steps; ++k) {
        z = kernel.advance(z, friction_weight[k], rng);
        if (k + 1 == obs_steps[next_obs]) {
          if (!std::isfinite(z.x()) || !std::isfinite(z.y())) {
            failures[worker].push_back(
                "path " + std::to_string(path) + ": non-finite state at t = " +
                std::to_string(params.t0 + static_cast<double>(k + 1) * dt));
            break;
          }
          ens.samples[next_obs][path] = z;
          ++next_obs;
        }
      }
    }
  });

  std::string report;
  std::size_t failed = 0;
  for (const auto& list : failures) {
    for (const auto& msg : list) {
      if (failed < 10) report += (report.empty() ? "" : "; ") + msg;
      ++failed;
    }
  }
  if (failed > 0) {
    fail(ErrorCode::propagation,
         std::to_string(failed) + " trajectories failed to propagate: " + report);
  }
  return ens;
}

double empirical_moment(const MarginalEnsemble& ens, double kappa, std::size_t time_index) {
  require(time_index < ens.samples.size(), ErrorCode::lookup, "time index out of range");
  const NoiseSpec& noise = ens.meta.params.noise;
  require(kappa >= 0.0, ErrorCode::parameter, "kappa must be >= 0");
  if (!noise.is_brownian() && kappa >= noise.alpha) {
    fail(ErrorCode::parameter, "moments of order >= alpha are infinite for stable noise");
  }
  const auto& column = ens.samples[time_index];
  require(!column.empty(), ErrorCode::input, "empty ensemble");
  if (kappa == 0.0) return 1.0;
  double sum = 0.0;
  for (const Vec2& z : column) sum += std::pow(z.norm(), kappa);
  return sum / static_cast<double>(column.size());
}

void write_samples_csv(const MarginalEnsemble& ens, double eps, std::ostream& out, bool header) {
  if (header) out << "time,eps,traj,x,v\n";
  char line[160];
  for (std::size_t j = 0; j < ens.samples.size(); ++j) {
    for (std::size_t i = 0; i < ens.samples[j].size(); ++i) {
      const Vec2& z = ens.samples[j][i];
      std::snprintf(line, sizeof line, "%.17g,%.17g,%zu,%.17g,%.17g\n", ens.obs_times[j], eps, i,
                    z.x(), z.y());
      out << line;
    }
  }
}

}  // namespace kinlab
