#include "gjn/srbm_sim.hpp"

#include <algorithm>
#include <cmath>

#include "gjn/random.hpp"

namespace gjn {

SrbmSpec SrbmSpec::make(Vector initial, Vector drift, Matrix covariance, Matrix reflection) {
  const Index d = drift.size();
  if (initial.size() != d || covariance.rows() != d || covariance.cols() != d || reflection.rows() != d ||
      reflection.cols() != d) {
    throw Error(ErrorKind::InvalidArgument, "SRBM data have inconsistent dimensions");
  }
  if ((initial.array() < 0.0).any()) throw Error(ErrorKind::NegativeStart, "SRBM initial state is negative");
  if (!is_m_matrix(reflection)) throw Error(ErrorKind::InvalidArgument, "reflection matrix is not an M-matrix");
  SrbmSpec s{std::move(initial), std::move(drift), std::move(covariance), std::move(reflection), Matrix()};
  s.cholesky_l = cholesky(s.covariance);
  return s;
}

Reflection simulate_srbm(const SrbmSpec& spec, double horizon, double step, std::uint64_t seed,
                         const SrbmOptions& options) {
  if (!(step > 0.0) || !(horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon and step must be positive");
  const double steps_real = std::round(horizon / step);
  if (steps_real > static_cast<double>(options.grid_cap)) {
    throw Error(ErrorKind::InvalidArgument, "grid has more points than the cap");
  }
  const Index N = std::max<Index>(1, static_cast<Index>(steps_real));
  const Index stride = std::max<Index>(1, options.record_stride);
  const double dt = horizon / static_cast<double>(N);
  const double sqrt_dt = std::sqrt(dt);
  const Index d = spec.dimension();

  const Index recorded = N / stride + 1 + (N % stride ? 1 : 0);
  Reflection out;
  out.z.times.resize(recorded);
  out.z.values.resize(recorded, d);
  out.y.times.resize(recorded);
  out.y.values.resize(recorded, d);

  Rng rng(seed);
  ReflectionStepper stepper(spec.reflection, options.reflect);
  Vector w = Vector::Zero(d);
  Vector noise(d);
  Vector x = spec.initial;
  Index row = 0;
  auto keep = [&](double t) {
    out.z.times(row) = t;
    out.y.times(row) = t;
    out.z.values.row(row) = stepper.z().transpose();
    out.y.values.row(row) = stepper.y().transpose();
    ++row;
  };
  stepper.step(x);
  keep(0.0);
  for (Index n = 1; n <= N; ++n) {
    for (Index j = 0; j < d; ++j) noise(j) = rng.normal();
    w += sqrt_dt * noise;
    const double t = static_cast<double>(n) * dt;
    x.noalias() = spec.initial + t * spec.drift;
    x.noalias() += spec.cholesky_l * w;
    stepper.step(x);
    if (n % stride == 0 || n == N) keep(t);
  }
  out.complementarity_residual = stepper.complementarity_residual();
  out.iterations = stepper.max_iterations_used();
  return out;
}

Reflection simulate_prelimit_family(const Matrix& reflection, const Matrix& gamma, const ScaleRegime& regime,
                                    double r, const Vector& z_tilde0, Index block, double horizon, double step,
                                    std::uint64_t seed, const SrbmOptions& options) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "r must lie in (0,1)");
  if (block < 0 || block >= regime.block_count()) throw Error(ErrorKind::InvalidArgument, "block index out of range");
  const double g = regime.gamma(block, r);
  // gamma X(t / gamma^2) = gamma Z(0) - R delta t / gamma + L W'(t) in law.
  const Vector drift = -(reflection * regime.idle_rates(r)) / g;
  const SrbmSpec spec = SrbmSpec::make(g * z_tilde0, drift, gamma, reflection);
  return simulate_srbm(spec, horizon, step, seed, options);
}

PathGrid simulate_prelimit_family(const NetworkSpec& spec, double r, const Vector& z_tilde0, Index block,
                                  double horizon, double step, std::uint64_t seed, const SrbmOptions& options) {
  require_valid(spec);
  return simulate_prelimit_family(reflection_matrix(spec.routing), covariance_gamma(spec), spec.regime, r, z_tilde0,
                                  block, horizon, step, seed, options)
      .z;
}

PathGrid simulate_limit(const LimitDescriptor& desc, Index component, const Vector& initial, double horizon,
                        double step, std::uint64_t seed, const SrbmOptions& options) {
  if (component < 0 || component >= static_cast<Index>(desc.components.size())) {
    throw Error(ErrorKind::InvalidArgument, "limit component out of range");
  }
  const SrbmComponent& c = desc.components[static_cast<std::size_t>(component)];
  if (initial.size() != c.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "initial state does not match the component dimension");
  }
  const SrbmSpec spec = SrbmSpec::make(initial, c.drift, c.covariance, c.reflection);
  return simulate_srbm(spec, horizon, step, seed, options).z.select(c.reported);
}

std::vector<Matrix> scaled_bm_family(std::uint64_t seed, const std::vector<double>& r_values, const Vector& t_grid,
                                     const ScaleRegime& regime) {
  const Index K = regime.block_count();
  struct Query {
    double time;
    std::size_t r;
    Index n, k;
  };
  std::vector<Query> queries;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    const double r = r_values[i];
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "r must lie in (0,1)");
    for (Index k = 0; k < K; ++k) {
      const double g = regime.gamma(k, r);
      for (Index n = 0; n < t_grid.size(); ++n) {
        if (t_grid(n) < 0.0) throw Error(ErrorKind::InvalidArgument, "negative time");
        queries.push_back({t_grid(n) / (g * g), i, n, k});
      }
    }
  }
  std::sort(queries.begin(), queries.end(), [](const Query& a, const Query& b) { return a.time < b.time; });

  std::vector<Matrix> out(r_values.size(), Matrix(t_grid.size(), K));
  Rng rng(seed);
  double t = 0.0, w = 0.0;
  for (const Query& q : queries) {
    if (q.time > t) {
      w += std::sqrt(q.time - t) * rng.normal();
      t = q.time;
    }
    out[q.r](q.n, q.k) = regime.gamma(q.k, r_values[q.r]) * w;
  }
  return out;
}

}  // namespace gjn
