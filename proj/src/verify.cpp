#include "gjn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gjn/error.hpp"
#include "gjn/random.hpp"
#include "gjn/replicate.hpp"
#include "gjn/srbm_sim.hpp"

namespace gjn {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::TrendPass: return "trend-pass";
    case Verdict::TrendFail: return "trend-fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

std::vector<double> column(const Matrix& m, Index j) {
  return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

Index row_at(const PathGrid& p, double t) {
  const Index n = p.points();
  const double h = n > 1 ? p.times(n - 1) / static_cast<double>(n - 1) : 1.0;
  const Index row = std::clamp<Index>(static_cast<Index>(std::llround(t / h)), 0, n - 1);
  if (std::abs(p.times(row) - t) > 1e-9 * std::max(1.0, t)) {
    throw Error(ErrorKind::GridMismatch, "probe time " + fmt(t) + " is not on the simulation grid");
  }
  return row;
}

}  // namespace

TestResult ks_exponential(const std::vector<double>& sample, double rate, double alpha) {
  if (sample.size() < 100) {
    throw Error(ErrorKind::TooFewSamples, "KS test needs at least 100 points, got " + std::to_string(sample.size()));
  }
  const KsResult ks = ks_one_sample_exponential(sample, rate);
  TestResult t;
  t.name = "ks_exponential";
  t.statistic = ks.distance;
  t.p_value = ks.p_value;
  t.threshold = alpha;
  t.verdict = ks.p_value >= alpha ? Verdict::Pass : Verdict::Fail;
  t.replications = ks.n;
  t.detail = "rate " + fmt(rate) + ", n " + std::to_string(ks.n);
  return t;
}

TestResult independence_test(const std::vector<std::vector<double>>& samples,
                             const std::vector<std::pair<Index, Index>>& pairs, double level) {
  if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "no coordinate pairs given");
  TestResult t;
  t.name = "independence";
  t.threshold = level;
  t.verdict = Verdict::Pass;
  double worst = -1.0;
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= static_cast<Index>(samples.size()) || b >= static_cast<Index>(samples.size())) {
      throw Error(ErrorKind::InvalidArgument, "coordinate pair out of range");
    }
    const auto& x = samples[static_cast<std::size_t>(a)];
    const auto& y = samples[static_cast<std::size_t>(b)];
    if (x.size() != y.size() || x.size() < 4) {
      throw Error(ErrorKind::TooFewSamples, "independence test needs at least 4 paired samples");
    }
    const double rho = pearson(x, y);
    const Interval ci = fisher_interval(rho, static_cast<Index>(x.size()), level);
    if (!ci.contains(0.0)) t.verdict = Verdict::Fail;
    if (std::abs(rho) > worst) {
      worst = std::abs(rho);
      t.statistic = rho;
      t.interval = ci;
    }
    t.replications = static_cast<Index>(x.size());
    if (!t.detail.empty()) t.detail += "; ";
    t.detail += "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ") pearson " + fmt(rho) + " ci [" +
                fmt(ci.lo) + ", " + fmt(ci.hi) + "] spearman " + fmt(spearman(x, y));
  }
  return t;
}

AbsorptionEstimate absorption_oracle(const Matrix& routing, Index chains, std::uint64_t seed) {
  const Index J = routing.rows();
  if (routing.cols() != J || chains < 1) throw Error(ErrorKind::InvalidArgument, "bad routing matrix or chain count");
  Matrix cumulative(J, J);
  for (Index i = 0; i < J; ++i) {
    double c = 0.0;
    for (Index k = 0; k < J; ++k) cumulative(i, k) = (c += routing(i, k));
  }
  AbsorptionEstimate est{Matrix::Zero(J, J), Matrix::Zero(J, J), chains};
  for (Index i = 0; i < J; ++i) {
    for (Index j = 0; j < J; ++j) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i * J + j), 0));
      Index hits = 0;
      for (Index c = 0; c < chains; ++c) {
        Index state = i;
        for (;;) {
          const double u = rng.uniform();
          Index next = J;  // exit
          for (Index k = 0; k < J; ++k) {
            if (u <= cumulative(state, k)) {
              next = k;
              break;
            }
          }
          if (next == j) {
            ++hits;
            break;
          }
          if (next == J || next > j) break;
          state = next;
        }
      }
      const double p = static_cast<double>(hits) / static_cast<double>(chains);
      est.w(i, j) = p;
      est.standard_error(i, j) = std::sqrt(p * (1.0 - p) / static_cast<double>(chains));
    }
  }
  return est;
}

TestResult variance_identity_audit(const std::vector<NetworkSpec>& specs, double tol) {
  TestResult t;
  t.name = "variance_identity";
  t.threshold = tol;
  t.replications = static_cast<Index>(specs.size());
  double worst = 0.0;
  for (const NetworkSpec& spec : specs) {
    for (Index j = 0; j < spec.stations(); ++j) {
      const double a = sigma_primitives(spec, j);
      const double b = sigma_uGu(spec, j);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-30));
    }
  }
  t.statistic = worst;
  t.verdict = worst <= tol ? Verdict::Pass : Verdict::Fail;
  t.detail = std::to_string(specs.size()) + " networks";
  return t;
}

LimitModel LimitModel::from_network(const NetworkSpec& spec) {
  require_valid(spec);
  return {reflection_matrix(spec.routing), covariance_gamma(spec), spec.regime, spec};
}

Vector prelimit_initial(const ScaleRegime& scales, Regime regime, const Vector& xi, double r) {
  const Index J = scales.stations();
  if (xi.size() != J) throw Error(ErrorKind::InvalidArgument, "xi has wrong length");
  if ((xi.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "xi must be nonnegative");
  const bool lowest = regime == Regime::Lowest || regime == Regime::BlockLowest;
  const Vector g = lowest ? Vector::Constant(J, scales.gamma(0, r)) : scales.station_gamma(r);
  return xi.cwiseQuotient(g);
}

std::vector<Matrix> prelimit_samples(const LimitModel& model, Regime regime, Source source, double r,
                                     const Vector& xi, const std::vector<double>& probes, Index replications,
                                     std::uint64_t master_seed, const RunOptions& options) {
  if (probes.empty()) throw Error(ErrorKind::InvalidArgument, "no probe times");
  const Index J = model.stations();
  const ScaleRegime& scales = model.scales;
  const Vector z_tilde0 = prelimit_initial(scales, regime, xi, r);
  const Vector probe_vec = Eigen::Map<const Vector>(probes.data(), static_cast<Index>(probes.size()));
  const double horizon = max_of(probes);

  using Rows = std::vector<Vector>;  // per probe, one row of J values
  std::function<Rows(Index)> one;
  if (source == Source::Gjn) {
    if (!model.network) throw Error(ErrorKind::InvalidArgument, "GJN source needs a network model");
    CountVector z0(J);
    for (Index j = 0; j < J; ++j) z0(j) = static_cast<std::int64_t>(std::ceil(z_tilde0(j)));
    std::vector<double> gammas;
    for (Index k = 0; k < scales.block_count(); ++k) gammas.push_back(scales.gamma(k, r));
    const Vector obs = observation_grid(probes, gammas);
    one = [&, z0, obs](Index rep) {
      const SimOutput out = simulate(*model.network, r, z0, obs(obs.size() - 1), obs,
                                     derive_seed(master_seed, static_cast<std::uint64_t>(rep), 1), options.sim);
      Rows rows(probes.size(), Vector(J));
      for (Index k = 0; k < scales.block_count(); ++k) {
        const PathGrid p = scaled_path(out, k, scales, probe_vec);
        for (std::size_t q = 0; q < probes.size(); ++q) {
          for (Index j = scales.blocks[k].first; j <= scales.blocks[k].last; ++j) {
            rows[q](j) = p.values(static_cast<Index>(q), j);
          }
        }
      }
      return rows;
    };
  } else {
    one = [&](Index rep) {
      Rows rows(probes.size(), Vector(J));
      SrbmOptions so;
      for (Index k = 0; k < scales.block_count(); ++k) {
        const Reflection refl =
            simulate_prelimit_family(model.reflection, model.gamma, scales, r, z_tilde0, k, horizon, options.step,
                                     derive_seed(master_seed, static_cast<std::uint64_t>(rep), 10 + k), so);
        for (std::size_t q = 0; q < probes.size(); ++q) {
          const Index row = row_at(refl.z, probes[q]);
          for (Index j = scales.blocks[k].first; j <= scales.blocks[k].last; ++j) rows[q](j) = refl.z.values(row, j);
        }
      }
      return rows;
    };
  }
  const auto reps = run_replications(replications, options.workers, one);
  std::vector<Matrix> out(probes.size(), Matrix(replications, J));
  for (Index i = 0; i < replications; ++i) {
    for (std::size_t q = 0; q < probes.size(); ++q) out[q].row(i) = reps[i][q].transpose();
  }
  return out;
}

std::vector<Matrix> limit_samples(const LimitDescriptor& desc, const Vector& xi, const std::vector<double>& probes,
                                  Index replications, std::uint64_t master_seed, const RunOptions& options) {
  if (probes.empty()) throw Error(ErrorKind::InvalidArgument, "no probe times");
  const Index J = xi.size();
  const double horizon = max_of(probes);
  const auto reps = run_replications(replications, options.workers, [&](Index rep) {
    std::vector<Vector> rows(probes.size(), Vector::Zero(J));
    for (std::size_t c = 0; c < desc.components.size(); ++c) {
      const SrbmComponent& comp = desc.components[c];
      const PathGrid p = simulate_limit(desc, static_cast<Index>(c), comp.initial_state(xi), horizon, options.step,
                                        derive_seed(master_seed, static_cast<std::uint64_t>(rep), 1000 + c));
      for (std::size_t q = 0; q < probes.size(); ++q) {
        const Index row = row_at(p, probes[q]);
        for (std::size_t m = 0; m < comp.stations.size(); ++m) {
          rows[q](comp.stations[m]) = p.values(row, static_cast<Index>(m));
        }
      }
    }
    return rows;
  });
  std::vector<Matrix> out(probes.size(), Matrix(replications, J));
  for (Index i = 0; i < replications; ++i) {
    for (std::size_t q = 0; q < probes.size(); ++q) out[q].row(i) = reps[i][q].transpose();
  }
  return out;
}

void require_r_grid(const std::vector<double>& r_grid) {
  if (r_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty r grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0 && r_grid[i] < 1.0)) throw Error(ErrorKind::InvalidArgument, "r values must lie in (0,1)");
    if (i > 0 && !(r_grid[i] < r_grid[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "r grid must be strictly decreasing");
    }
  }
}

std::vector<TestResult> functional_limit_check(const LimitModel& model, Regime regime, Source source,
                                               const std::vector<Index>& stations, const std::vector<double>& r_grid,
                                               const std::vector<double>& probes, const Vector& xi,
                                               Index replications, std::uint64_t master_seed,
                                               const RunOptions& options, double alpha) {
  require_r_grid(r_grid);
  const LimitDescriptor desc = limit_descriptor(model.reflection, model.gamma, model.scales, regime);
  const std::vector<Matrix> limit = limit_samples(desc, xi, probes, replications, master_seed, options);

  // distance[s][q][i] for station s, probe q, r_grid[i]
  std::vector<std::vector<std::vector<double>>> distance(
      stations.size(), std::vector<std::vector<double>>(probes.size()));
  std::vector<std::vector<double>> last_p(stations.size(), std::vector<double>(probes.size()));
  for (double r : r_grid) {
    const std::vector<Matrix> pre =
        prelimit_samples(model, regime, source, r, xi, probes, replications, master_seed, options);
    for (std::size_t s = 0; s < stations.size(); ++s) {
      for (std::size_t q = 0; q < probes.size(); ++q) {
        const KsResult ks = ks_two_sample(column(pre[q], stations[s]), column(limit[q], stations[s]));
        distance[s][q].push_back(ks.distance);
        last_p[s][q] = ks.p_value;
      }
    }
  }

  std::vector<TestResult> results;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    for (std::size_t q = 0; q < probes.size(); ++q) {
      const std::string tag = "[" + std::string(to_string(regime)) + ",station=" + std::to_string(stations[s] + 1) +
                              ",t=" + fmt(probes[q]) + "]";
      TestResult abs;
      abs.name = "functional_limit" + tag;
      abs.statistic = distance[s][q].back();
      abs.p_value = last_p[s][q];
      abs.threshold = alpha;
      abs.verdict = last_p[s][q] >= alpha ? Verdict::Pass : Verdict::Fail;
      abs.replications = replications;
      abs.seeds = {master_seed};
      abs.detail = "two-sample KS at r = " + fmt(r_grid.back());
      results.push_back(abs);

      TestResult trend;
      trend.name = "functional_limit_trend" + tag;
      ConvergenceSweep sweep{"ks_distance", r_grid, distance[s][q], decreasing_toward_zero(distance[s][q])};
      trend.statistic = distance[s][q].back();
      trend.verdict = sweep.monotone_trend ? Verdict::TrendPass : Verdict::TrendFail;
      trend.replications = replications;
      trend.seeds = {master_seed};
      trend.detail = "KS distance over r " + list(r_grid) + ": " + list(distance[s][q]);
      trend.sweeps.push_back(sweep);
      results.push_back(trend);
    }
  }
  return results;
}

std::vector<TestResult> asymptotic_independence_check(const LimitModel& model, Regime regime, Source source,
                                                      const std::vector<std::pair<Index, Index>>& pairs,
                                                      const std::vector<double>& r_grid, double probe,
                                                      const Vector& xi, Index replications,
                                                      std::uint64_t master_seed, const RunOptions& options) {
  require_r_grid(r_grid);
  std::vector<double> worst;
  TestResult last;
  for (double r : r_grid) {
    const Matrix m = prelimit_samples(model, regime, source, r, xi, {probe}, replications, master_seed, options)[0];
    std::vector<std::vector<double>> cols;
    for (Index j = 0; j < m.cols(); ++j) cols.push_back(column(m, j));
    last = independence_test(cols, pairs, 0.99);
    worst.push_back(std::abs(last.statistic));
  }
  last.name = "independence[t=" + fmt(probe) + "]";
  last.seeds = {master_seed};
  last.detail = "r = " + fmt(r_grid.back()) + ": " + last.detail;

  TestResult trend;
  trend.name = "independence_trend[t=" + fmt(probe) + "]";
  ConvergenceSweep sweep{"max_abs_correlation", r_grid, worst, decreasing_toward_zero(worst)};
  trend.statistic = worst.back();
  trend.verdict = sweep.monotone_trend ? Verdict::TrendPass : Verdict::TrendFail;
  trend.replications = replications;
  trend.seeds = {master_seed};
  trend.detail = "max |pearson| over r " + list(r_grid) + ": " + list(worst);
  trend.sweeps.push_back(sweep);
  return {trend, last};
}

TestResult scale_separation_check(const LimitModel& model, const std::vector<Index>& blocks,
                                  const std::vector<double>& r_grid, const Vector& xi, double horizon,
                                  Index replications, std::uint64_t master_seed, const RunOptions& options) {
  require_r_grid(r_grid);
  const ScaleRegime& scales = model.scales;
  const Index K = scales.block_count();
  TestResult t;
  t.name = "scale_separation";
  t.threshold = 1e-12;
  t.replications = replications;
  t.seeds = {master_seed};
  if (K == 1) {
    t.verdict = Verdict::NotApplicable;
    t.detail = "single block: no slower or faster stations";
    return t;
  }
  const Index J = model.stations();
  for (Index k : blocks) {
    if (k < 0 || k >= K) throw Error(ErrorKind::InvalidArgument, "block index out of range");
    const Index lo = scales.blocks[k].first;
    const Index hi = scales.blocks[k].last;
    const bool slower = lo > 0;
    const bool faster = hi < J - 1;
    std::vector<double> z_side, y_side;
    for (double r : r_grid) {
      const Vector z0 = prelimit_initial(scales, Regime::Matching, xi, r);
      const auto sups = run_replications(replications, options.workers, [&](Index rep) {
        const Reflection refl =
            simulate_prelimit_family(model.reflection, model.gamma, scales, r, z0, k, horizon, options.step,
                                     derive_seed(master_seed, static_cast<std::uint64_t>(rep), 20 + k));
        const double zs = slower ? refl.z.values.leftCols(lo).cwiseAbs().maxCoeff() : 0.0;
        const double ys = faster ? refl.y.values.rightCols(J - 1 - hi).cwiseAbs().maxCoeff() : 0.0;
        return std::pair<double, double>{zs, ys};
      });
      std::vector<double> zs, ys;
      for (const auto& [a, b] : sups) {
        zs.push_back(a);
        ys.push_back(b);
      }
      if (slower) z_side.push_back(median(zs));
      if (faster) y_side.push_back(median(ys));
    }
    const std::string tag = "block " + std::to_string(k + 1);
    if (slower) {
      t.sweeps.push_back({"median_sup_scaled_queue_slower[" + tag + "]", r_grid, z_side,
                          decreasing_toward_zero(z_side, 1e-12)});
    }
    if (faster) {
      t.sweeps.push_back({"median_sup_scaled_regulator_faster[" + tag + "]", r_grid, y_side,
                          decreasing_toward_zero(y_side, 1e-12)});
    }
  }
  if (t.sweeps.empty()) {
    t.verdict = Verdict::NotApplicable;
    t.detail = "requested blocks have no slower or faster neighbours";
    return t;
  }
  bool ok = true;
  for (const auto& s : t.sweeps) {
    ok = ok && s.monotone_trend;
    t.statistic = std::max(t.statistic, s.values.back());
    if (!t.detail.empty()) t.detail += "; ";
    t.detail += s.metric + " " + list(s.values);
  }
  t.verdict = ok ? Verdict::TrendPass : Verdict::TrendFail;
  return t;
}

}  // namespace gjn
