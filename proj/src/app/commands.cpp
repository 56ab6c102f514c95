#include "gjn/app/commands.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "gjn/gjn_sim.hpp"
#include "gjn/json_util.hpp"
#include "gjn/limit_calculus.hpp"
#include "gjn/replicate.hpp"
#include "gjn/srbm_sim.hpp"
#include "gjn/verify.hpp"

namespace gjn::app {

using json_util::json;
namespace fs = std::filesystem;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"limits", "simulate-gjn", "simulate-srbm", "verify", "sweep"};
  return names;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::EventOverflow:
    case ErrorKind::GridMismatch:
    case ErrorKind::TooFewSamples:
      return 3;
    default:
      return 2;
  }
}

namespace {

/// Shortest round-trip decimal form, so CSV bytes only depend on the values.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  Csv& cell(const std::string& s) {
    out_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  Csv& cell(double v) { return cell(num(v)); }
  Csv& cell(std::int64_t v) { return cell(std::to_string(v)); }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  std::ofstream out_;
  bool first_ = true;
};

std::vector<std::string> station_columns(const std::string& prefix, Index J) {
  std::vector<std::string> cols;
  for (Index j = 1; j <= J; ++j) cols.push_back(prefix + "_" + std::to_string(j));
  return cols;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

json to_json(const TestResult& t) {
  json out{{"name", t.name},
           {"statistic", t.statistic},
           {"threshold", t.threshold},
           {"verdict", std::string(to_string(t.verdict))},
           {"replications", t.replications},
           {"seeds", t.seeds},
           {"detail", t.detail}};
  out["p_value"] = t.p_value ? json(*t.p_value) : json(nullptr);
  out["interval"] = t.interval ? json::array({t.interval->lo, t.interval->hi}) : json(nullptr);
  out["sweeps"] = json::array();
  for (const auto& s : t.sweeps) {
    out["sweeps"].push_back(
        {{"metric", s.metric}, {"r_grid", s.r_grid}, {"values", s.values}, {"monotone_trend", s.monotone_trend}});
  }
  return out;
}

json component_json(const SrbmComponent& c) {
  std::vector<Index> reported, stations;
  for (Index i : c.reported) reported.push_back(i + 1);
  for (Index i : c.stations) stations.push_back(i + 1);
  return {{"initial", c.initial_label},
          {"drift", json_util::to_json(c.drift)},
          {"covariance", json_util::to_json(c.covariance)},
          {"reflection", json_util::to_json(c.reflection)},
          {"reported_coordinates", reported},
          {"stations", stations}};
}

struct Context {
  const ExperimentConfig& config;
  const CommandOptions& options;
  std::ostream& log;
  fs::path dir;
  json report;
  std::vector<std::string> artifacts;

  fs::path artifact(const std::string& name) {
    artifacts.push_back(name);
    return dir / name;
  }
  RunOptions run_options() const {
    RunOptions o;
    o.workers = config.workers;
    o.step = config.step;
    o.sim.event_cap = config.event_cap;
    return o;
  }
};

CountVector initial_queues(const ExperimentConfig& c, double r) {
  const Vector z = prelimit_initial(c.network.regime, c.regime, c.xi, r);
  CountVector z0(z.size());
  for (Index j = 0; j < z.size(); ++j) z0(j) = static_cast<std::int64_t>(std::ceil(z(j)));
  return z0;
}

std::vector<double> scaled_grid(double horizon, Index points) {
  std::vector<double> t;
  for (Index n = 0; n <= points; ++n) t.push_back(horizon * static_cast<double>(n) / static_cast<double>(points));
  return t;
}

int cmd_limits(Context& ctx) {
  const NetworkSpec& spec = ctx.config.network;
  const Index J = spec.stations();
  const Matrix R = reflection_matrix(spec.routing);
  const Matrix w = w_matrix(spec.routing);
  const Matrix w2 = w_from_R(R);
  const Matrix gamma = covariance_gamma(spec);
  const Vector lambda = solve_traffic(spec);

  json L;
  L["lambda"] = json_util::to_json(lambda);
  L["spectral_radius"] = spectral_radius(spec.routing);
  L["R"] = json_util::to_json(R);
  L["w"] = json_util::to_json(w);
  L["w_from_R_residual"] = (w - w2).cwiseAbs().maxCoeff();
  L["Gamma"] = json_util::to_json(gamma);
  L["rates"] = json::array();
  for (double r : ctx.config.r_grid) {
    const Vector mu = service_rates(spec, lambda, r);
    L["rates"].push_back(
        {{"r", r}, {"mu", json_util::to_json(mu)}, {"rho", json_util::to_json(Vector(lambda.cwiseQuotient(mu)))}});
  }
  L["elimination"] = json::array();
  double worst_elim = 0.0;
  for (Index k = 0; k < J; ++k) {
    const auto e = eliminate(R, k);
    const double res = (e.E * R - e.G).cwiseAbs().rowwise().sum().maxCoeff();
    const double pivot = std::abs(e.G(k, k) - (1.0 - w(k, k)));
    worst_elim = std::max({worst_elim, res, pivot});
    L["elimination"].push_back({{"k", k + 1},
                                {"E", json_util::to_json(e.E)},
                                {"G", json_util::to_json(e.G)},
                                {"residual", res},
                                {"pivot_gap", pivot}});
  }
  L["sigma"] = json::array();
  double worst_sigma = 0.0;
  for (Index j = 0; j < J; ++j) {
    const double a = sigma_primitives(spec, j);
    const double b = sigma_uGu(spec, j);
    const double gap = std::abs(a - b) / std::max(std::abs(a), 1e-30);
    worst_sigma = std::max(worst_sigma, gap);
    L["sigma"].push_back({{"station", j + 1}, {"sigma2", a}, {"uGu", b}, {"relative_gap", gap}});
  }
  const LimitDescriptor desc = limit_descriptor(spec, ctx.config.regime);
  json comps = json::array();
  for (const auto& c : desc.components) comps.push_back(component_json(c));
  L["descriptor"] = {{"regime", std::string(to_string(desc.regime))}, {"components", comps}};
  ctx.report["limits"] = L;

  ctx.log << "stations " << J << ", spectral radius " << num(spectral_radius(spec.routing)) << "\n";
  ctx.log << "max elimination residual " << num(worst_elim) << ", max sigma identity gap " << num(worst_sigma)
          << ", w residual " << num((w - w2).cwiseAbs().maxCoeff()) << "\n";
  ctx.log << to_string(desc.regime) << " descriptor: " << desc.components.size() << " component(s)\n";
  return 0;
}

int cmd_simulate_gjn(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const NetworkSpec& spec = c.network;
  const Index J = spec.stations();
  const ScaleRegime& scales = spec.regime;
  const std::vector<double> grid = scaled_grid(c.horizon, c.grid_points);
  const RunOptions ro = ctx.run_options();

  std::optional<Csv> plot;
  if (ctx.options.emit_plot_data) {
    plot.emplace(ctx.artifact("plot_gjn.csv"),
                 std::vector<std::string>{"r", "replication", "block", "t_scaled", "station", "scaled_queue"});
  }
  json runs = json::array();
  for (double r : c.r_grid) {
    std::vector<double> gammas;
    for (Index k = 0; k < scales.block_count(); ++k) gammas.push_back(scales.gamma(k, r));
    const Vector obs = observation_grid(grid, gammas);
    const CountVector z0 = initial_queues(c, r);
    const auto outs = run_replications(c.replications, c.workers, [&](Index rep) {
      return simulate(spec, r, z0, obs(obs.size() - 1), obs, derive_seed(c.master_seed, static_cast<std::uint64_t>(rep), 1),
                      ro.sim);
    });

    Csv csv(ctx.artifact("gjn_r" + num(r) + ".csv"),
            concat(concat(concat({"replication", "t"}, station_columns("Z", J)), station_columns("B", J)),
                   station_columns("Y", J)));
    std::uint64_t events = 0;
    std::size_t flow_failures = 0;
    Vector final_scaled = Vector::Zero(J);
    const Vector grid_vec = Eigen::Map<const Vector>(grid.data(), static_cast<Index>(grid.size()));
    for (Index rep = 0; rep < c.replications; ++rep) {
      const SimOutput& out = outs[static_cast<std::size_t>(rep)];
      events += out.event_count;
      flow_failures += flow_conservation_failures(out).size();
      for (Index n = 0; n < obs.size(); ++n) {
        csv.cell(static_cast<std::int64_t>(rep)).cell(out.sample_times(n));
        for (Index j = 0; j < J; ++j) csv.cell(out.queue_lengths(n, j));
        for (Index j = 0; j < J; ++j) csv.cell(out.busy_times(n, j));
        for (Index j = 0; j < J; ++j) csv.cell(out.idle_regulator(n, j));
        csv.end();
      }
      for (Index k = 0; k < scales.block_count(); ++k) {
        const PathGrid p = scaled_path(out, k, scales, grid_vec);
        for (Index j = scales.blocks[k].first; j <= scales.blocks[k].last; ++j) {
          final_scaled(j) += p.values(p.points() - 1, j) / static_cast<double>(c.replications);
        }
        if (plot) {
          for (Index n = 0; n < p.points(); ++n) {
            for (Index j = 0; j < J; ++j) {
              plot->cell(r).cell(static_cast<std::int64_t>(rep)).cell(static_cast<std::int64_t>(k + 1));
              plot->cell(p.times(n)).cell(static_cast<std::int64_t>(j + 1)).cell(p.values(n, j));
              plot->end();
            }
          }
        }
      }
    }
    runs.push_back({{"r", r},
                    {"initial_queues", std::vector<std::int64_t>(z0.data(), z0.data() + J)},
                    {"events", events},
                    {"flow_conservation_failures", flow_failures},
                    {"mean_scaled_queue_at_horizon", json_util::to_json(final_scaled)}});
    ctx.log << "r " << num(r) << ": " << events << " events over " << c.replications << " replications, "
            << flow_failures << " flow identity failures\n";
    if (flow_failures) throw Error(ErrorKind::InvalidArgument, "flow conservation failed");
  }
  ctx.report["runs"] = runs;
  return 0;
}

void write_reflection(Csv& csv, Index rep, const Reflection& refl) {
  for (Index n = 0; n < refl.z.points(); ++n) {
    csv.cell(static_cast<std::int64_t>(rep)).cell(refl.z.times(n));
    for (Index j = 0; j < refl.z.dimension(); ++j) csv.cell(refl.z.values(n, j));
    for (Index j = 0; j < refl.z.dimension(); ++j) csv.cell(refl.y.values(n, j));
    csv.end();
  }
}

json reflection_summary(const std::vector<Reflection>& runs) {
  const Index d = runs.front().z.dimension();
  Vector mean = Vector::Zero(d), second = Vector::Zero(d);
  double residual = 0.0;
  for (const auto& r : runs) {
    const Vector last = r.z.values.bottomRows(1).transpose();
    mean += last;
    second += last.cwiseProduct(last);
    residual = std::max(residual, r.complementarity_residual);
  }
  const double n = static_cast<double>(runs.size());
  mean /= n;
  second /= n;
  return {{"mean_at_horizon", json_util::to_json(mean)},
          {"variance_at_horizon", json_util::to_json(Vector(second - mean.cwiseProduct(mean)))},
          {"max_complementarity_residual", residual}};
}

int cmd_simulate_srbm(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  SrbmOptions so;
  const Index steps = static_cast<Index>(std::llround(c.horizon / c.step));
  so.record_stride = std::max<Index>(1, steps / c.grid_points);

  auto header = [](Index d) {
    return concat(concat({"replication", "t"}, station_columns("Z", d)), station_columns("Y", d));
  };
  json runs = json::array();
  if (c.srbm) {
    const SrbmSpec spec = SrbmSpec::make(c.srbm->initial, c.srbm->drift, c.srbm->covariance, c.srbm->reflection);
    const auto out = run_replications(c.replications, c.workers, [&](Index rep) {
      return simulate_srbm(spec, c.horizon, c.step, derive_seed(c.master_seed, static_cast<std::uint64_t>(rep), 2), so);
    });
    Csv csv(ctx.artifact("srbm.csv"), header(spec.dimension()));
    for (Index rep = 0; rep < c.replications; ++rep) write_reflection(csv, rep, out[static_cast<std::size_t>(rep)]);
    if (ctx.options.emit_plot_data) {
      Csv plot(ctx.artifact("plot_srbm.csv"), {"replication", "t", "coordinate", "z"});
      for (Index rep = 0; rep < c.replications; ++rep) {
        const PathGrid& z = out[static_cast<std::size_t>(rep)].z;
        for (Index n = 0; n < z.points(); ++n)
          for (Index j = 0; j < z.dimension(); ++j) {
            plot.cell(std::int64_t{rep}).cell(z.times(n)).cell(std::int64_t{j + 1}).cell(z.values(n, j)).end();
          }
      }
    }
    json s = reflection_summary(out);
    s["source"] = "config.srbm";
    runs.push_back(s);
  } else {
    const LimitModel model = LimitModel::from_network(c.network);
    std::optional<Csv> plot;
    if (ctx.options.emit_plot_data) {
      plot.emplace(ctx.artifact("plot_srbm.csv"),
                   std::vector<std::string>{"r", "replication", "block", "t_scaled", "station", "scaled_queue"});
    }
    for (double r : c.r_grid) {
      const Vector z0 = prelimit_initial(model.scales, c.regime, c.xi, r);
      for (Index k = 0; k < model.scales.block_count(); ++k) {
        const auto out = run_replications(c.replications, c.workers, [&](Index rep) {
          return simulate_prelimit_family(model.reflection, model.gamma, model.scales, r, z0, k, c.horizon, c.step,
                                          derive_seed(c.master_seed, static_cast<std::uint64_t>(rep), 10 + k), so);
        });
        Csv csv(ctx.artifact("srbm_r" + num(r) + "_block" + std::to_string(k + 1) + ".csv"),
                header(model.stations()));
        for (Index rep = 0; rep < c.replications; ++rep) {
          const Reflection& refl = out[static_cast<std::size_t>(rep)];
          write_reflection(csv, rep, refl);
          if (plot) {
            for (Index n = 0; n < refl.z.points(); ++n) {
              for (Index j = 0; j < refl.z.dimension(); ++j) {
                plot->cell(r).cell(static_cast<std::int64_t>(rep)).cell(static_cast<std::int64_t>(k + 1));
                plot->cell(refl.z.times(n)).cell(static_cast<std::int64_t>(j + 1)).cell(refl.z.values(n, j));
                plot->end();
              }
            }
          }
        }
        json s = reflection_summary(out);
        s["r"] = r;
        s["block"] = k + 1;
        runs.push_back(s);
      }
    }
  }
  ctx.report["runs"] = runs;
  ctx.log << "wrote " << ctx.artifacts.size() << " file(s)\n";
  return 0;
}

std::vector<TestResult> stationary_checks(const ExperimentConfig& c, const RunOptions& ro) {
  const NetworkSpec& spec = c.network;
  const Index J = spec.stations();
  std::vector<TestResult> out;
  if (!spec.regime.all_singletons()) {
    TestResult t;
    t.name = "ks_exponential";
    t.verdict = Verdict::NotApplicable;
    t.detail = "needs one station per block";
    return {t};
  }
  const double r = c.r_grid.back();
  const double g = spec.regime.gamma(spec.regime.block_count() - 1, r);
  const double unit = 1.0 / (g * g);
  const std::uint64_t seed = derive_seed(c.master_seed, 0, 502);
  const StationarySample s = stationary_sample(spec, r, seed, c.stationary.burn_in * unit, c.stationary.batches,
                                               c.stationary.batch_len * unit, ro.sim);
  const LimitDescriptor desc = limit_descriptor(spec, Regime::Matching);
  for (Index j = 0; j < J; ++j) {
    const SrbmComponent& comp = desc.components[static_cast<std::size_t>(j)];
    const double rate = 2.0 * std::abs(comp.drift(0)) / comp.covariance(0, 0);
    const std::string tag = "[station=" + std::to_string(j + 1) + ",r=" + num(r) + "]";

    std::vector<double> boundary(s.boundary.col(j).data(), s.boundary.col(j).data() + s.boundary.rows());
    TestResult ks = ks_exponential(boundary, rate);
    ks.name += tag;
    ks.seeds = {c.master_seed};
    out.push_back(ks);

    std::vector<double> means(s.batch_means.col(j).data(), s.batch_means.col(j).data() + s.batch_means.rows());
    TestResult m;
    m.name = "stationary_mean" + tag;
    m.statistic = std::abs(gjn::mean(means) * rate - 1.0);
    m.threshold = 0.1;
    m.verdict = m.statistic <= m.threshold ? Verdict::Pass : Verdict::Fail;
    m.replications = s.batch_means.rows();
    m.seeds = {c.master_seed};
    m.detail = "mean of batch means " + num(gjn::mean(means)) + " vs limit mean " + num(1.0 / rate);
    out.push_back(m);
  }
  return out;
}

TestResult absorption_check(const ExperimentConfig& c) {
  const Matrix& P = c.network.routing;
  const Matrix w = w_matrix(P);
  const AbsorptionEstimate est = absorption_oracle(P, c.chains, derive_seed(c.master_seed, 0, 501));
  TestResult t;
  t.name = "absorption_oracle";
  t.threshold = 3.0;
  t.replications = c.chains;
  t.seeds = {c.master_seed};
  const double n = static_cast<double>(c.chains);
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      const double diff = std::abs(est.w(i, j) - w(i, j));
      if (diff <= 1e-12) continue;
      const double se = std::sqrt(std::max(w(i, j) * (1.0 - w(i, j)), 0.0) / n);
      t.statistic = std::max(t.statistic, se > 0.0 ? diff / se : std::numeric_limits<double>::infinity());
    }
  }
  t.verdict = t.statistic <= t.threshold ? Verdict::Pass : Verdict::Fail;
  t.detail = "largest |w_hat - w| in null standard errors";
  return t;
}

std::vector<std::pair<Index, Index>> all_pairs(Index J) {
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < J; ++i) {
    for (Index j = i + 1; j < J; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> v;
  for (Index i = 0; i < n; ++i) v.push_back(i);
  return v;
}

bool enabled(const ExperimentConfig& c, const std::string& name) {
  return std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
}

// RFC 4180 quoting is only needed for names with commas.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

void write_sweeps(Context& ctx, const std::vector<TestResult>& results, const std::string& file) {
  Csv csv(ctx.artifact(file), {"test", "metric", "r", "value"});
  for (const auto& t : results) {
    for (const auto& s : t.sweeps) {
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        csv.cell(csv_field(t.name)).cell(csv_field(s.metric)).cell(s.r_grid[i]).cell(s.values[i]);
        csv.end();
      }
    }
  }
}

int finish_results(Context& ctx, std::vector<TestResult> results, bool trends_only) {
  if (trends_only) {
    std::erase_if(results, [](const TestResult& t) { return t.sweeps.empty(); });
  }
  json list = json::array();
  int code = 0;
  for (const auto& t : results) {
    list.push_back(to_json(t));
    if (t.verdict == Verdict::Fail) code = 1;
    ctx.log << to_string(t.verdict) << "  " << t.name << "  statistic " << num(t.statistic);
    if (t.p_value) ctx.log << "  p " << num(*t.p_value);
    ctx.log << "\n";
  }
  ctx.report["results"] = list;
  ctx.report["passed"] = code == 0;
  write_sweeps(ctx, results, "sweeps.csv");
  if (ctx.options.emit_plot_data) write_sweeps(ctx, results, "plot_sweeps.csv");
  return code;
}

int cmd_verify(Context& ctx, bool sweep_only) {
  const ExperimentConfig& c = ctx.config;
  const NetworkSpec& spec = c.network;
  const Index J = spec.stations();
  const RunOptions ro = ctx.run_options();
  const LimitModel model = LimitModel::from_network(spec);
  std::vector<TestResult> results;

  if (!sweep_only) {
    if (enabled(c, "variance_identity")) results.push_back(variance_identity_audit({spec}));
    if (enabled(c, "absorption")) results.push_back(absorption_check(c));
    if (enabled(c, "ks_exponential")) {
      for (auto& t : stationary_checks(c, ro)) results.push_back(t);
    }
  }
  if (enabled(c, "functional_limit")) {
    for (auto& t : functional_limit_check(model, c.regime, Source::Gjn, all_indices(J), c.r_grid, c.probe_times,
                                          c.xi, c.replications, c.master_seed, ro)) {
      results.push_back(t);
    }
  }
  if (enabled(c, "independence") && J >= 2) {
    for (auto& t : asymptotic_independence_check(model, c.regime, Source::Gjn, all_pairs(J), c.r_grid,
                                                 c.probe_times.front(), c.xi, c.replications, c.master_seed, ro)) {
      results.push_back(t);
    }
  }
  if (enabled(c, "scale_separation") && !sweep_only) {
    results.push_back(scale_separation_check(model, all_indices(model.scales.block_count()), c.r_grid, c.xi,
                                             c.horizon, c.replications, c.master_seed, ro));
  }
  return finish_results(ctx, std::move(results), sweep_only);
}

}  // namespace

int run_command(const std::string& name, const ExperimentConfig& config, const CommandOptions& options,
                std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, options, log, fs::path(config.out_dir), json::object(), {}};
  fs::create_directories(ctx.dir);
  ctx.report["command"] = name;
  // Where and how wide the run was goes to timing.json, so repeated runs
  // give identical reports.
  json echo = to_json(config);
  json run_env{{"out_dir", echo["out_dir"]}, {"workers", echo["workers"]}};
  echo.erase("out_dir");
  echo.erase("workers");
  ctx.report["config"] = std::move(echo);

  int code = 0;
  if (name == "limits") {
    code = cmd_limits(ctx);
  } else if (name == "simulate-gjn") {
    code = cmd_simulate_gjn(ctx);
  } else if (name == "simulate-srbm") {
    code = cmd_simulate_srbm(ctx);
  } else if (name == "verify") {
    code = cmd_verify(ctx, false);
  } else if (name == "sweep") {
    code = cmd_verify(ctx, true);
  } else {
    throw Error(ErrorKind::Config, "unknown subcommand '" + name + "'");
  }

  ctx.report["artifacts"] = ctx.artifacts;
  {
    std::ofstream out(ctx.dir / "report.json", std::ios::binary);
    out << ctx.report.dump(2) << '\n';
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream out(ctx.dir / "timing.json", std::ios::binary);
    out << json{{"command", name}, {"runtime_seconds", seconds}, {"run", run_env}}.dump(2) << '\n';
  }
  log << "report: " << (ctx.dir / "report.json").string() << " (" << num(seconds) << " s)\n";
  return code;
}

}  // namespace gjn::app
