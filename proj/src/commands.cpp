#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "brwfpt/brw.hpp"
#include "brwfpt/cli.hpp"
#include "brwfpt/estimator.hpp"
#include "brwfpt/upperdev.hpp"

namespace brwfpt::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

/// '#'-prefixed key=value metadata, then a header line, then rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void meta(const std::string& key, const std::string& value) { out_ << "# " << key << "=" << value << '\n'; }

  void header(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

void write_config_meta(CsvWriter& w, const RunConfig& c) {
  std::string pmf;
  for (std::size_t i = 0; i < c.offspring.size(); ++i) {
    pmf += (i ? "," : "") + std::to_string(c.offspring[i].count) + ":" + fmt(c.offspring[i].prob);
  }
  w.meta("dimension", fmt(c.dimension));
  w.meta("offspring", pmf);
  w.meta("jump", c.jump);
  w.meta("sigma", fmt(c.sigma));
  w.meta("x", join(c.x));
  w.meta("t", fmt(c.t));
  w.meta("chat1_factor", fmt(c.chat1_factor));
  w.meta("omega", fmt(c.omega));
  w.meta("samples", c.plan_samples ? std::string("auto") : fmt(c.samples));
  w.meta("seed", fmt(c.seed));
  w.meta("K", fmt(c.K));
  w.meta("r", fmt(c.r));
  w.meta("bone_sum_check", bone_sum_check_name(c.bone_sum_check));
}

void write_profile_meta(CsvWriter& w, const CramerProfile& p) {
  w.meta("rho", fmt(p.rho));
  w.meta("c1", fmt(p.c1));
  w.meta("chat1", fmt(p.chat1));
  w.meta("chat2", fmt(p.chat2));
  w.meta("I_chat1", fmt(p.I_chat1));
  w.meta("psi_chat2", fmt(p.psi_chat2));
  w.meta("cbar1", fmt(p.cbar1));
  w.meta("eps1", fmt(p.eps1));
}

CramerProfile lower_profile(const RunConfig& c, const BrwModel& model) {
  if (!(c.chat1_factor > 1.0)) {
    throw ConfigLoadError(std::vector<FieldError>{{"chat1_factor", "must exceed 1 for lower-tail estimation"}});
  }
  return derive_profile(model, c.chat1_factor);
}

std::uint64_t samples_for(const RunConfig& c, double x) {
  return c.plan_samples ? plan_sample_size(c.epsilon, c.delta, x, c.r) : c.samples;
}

BatchOptions batch_options(const RunConfig& c) {
  return {c.threads, static_cast<std::size_t>(c.cap), c.bone_sum_check};
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void cmd_estimate(const RunConfig& c, std::ostream& out) {
  const BrwModel model = make_model(c);
  const CramerProfile profile = lower_profile(c, model);
  CsvWriter w(out);
  w.meta("command", "estimate");
  write_config_meta(w, c);
  write_profile_meta(w, profile);
  w.header({"x", "n", "t", "chat1", "estimate", "stderr", "N", "acceptance_rate", "truncations", "runtime_seconds",
            "seed", "omega", "chat1_factor", "bone_sum_violations"});
  for (double x : c.x) {
    const AlgoParams params = make_params(profile, model.dim, x, c.t, c.omega);
    const std::uint64_t N = samples_for(c, x);
    const auto start = std::chrono::steady_clock::now();
    const BatchStats s = run_batch(model, profile, params, N, c.seed, batch_options(c));
    const double runtime = c.timing ? elapsed_since(start) : 0.0;
    w.row({fmt(x), fmt(params.n), fmt(params.t), fmt(profile.chat1), fmt(s.mean()), fmt(s.stderr_mean()), fmt(N),
           fmt(s.acceptance_rate()), fmt(s.truncated), fmt(runtime), fmt(c.seed), fmt(c.omega),
           fmt(c.chat1_factor), fmt(s.bone_sum_violations)});
  }
}

void cmd_cdf(const RunConfig& c, std::ostream& out) {
  const BrwModel model = make_model(c);
  const CramerProfile profile = lower_profile(c, model);
  CsvWriter w(out);
  w.meta("command", "cdf");
  write_config_meta(w, c);
  write_profile_meta(w, profile);
  w.header({"x", "K", "t", "n", "pmf_estimate", "pmf_stderr", "cumulative", "cumulative_stderr", "N",
            "acceptance_rate", "truncations", "seed", "omega"});
  for (double x : c.x) {
    const std::uint64_t N = samples_for(c, x);
    const CdfEstimate est = estimate_cdf(model, profile, x, c.K, c.omega, N, c.seed, batch_options(c));
    double cum = 0.0;
    double var = 0.0;
    for (const CdfTerm& term : est.terms) {
      cum += term.stats.mean();
      if (term.stats.stderr_defined()) var += term.stats.stderr_mean() * term.stats.stderr_mean();
      w.row({fmt(x), fmt(c.K), fmt(term.t), fmt(term.params.n), fmt(term.stats.mean()), fmt(term.stats.stderr_mean()),
             fmt(cum), fmt(std::sqrt(var)), fmt(N), fmt(term.stats.acceptance_rate()), fmt(term.stats.truncated),
             fmt(term.seed), fmt(c.omega)});
    }
  }
}

void cmd_brute(const RunConfig& c, std::ostream& out) {
  const BrwModel model = make_model(c);
  CsvWriter w(out);
  w.meta("command", "brute");
  write_config_meta(w, c);
  w.meta("horizon", fmt(c.horizon));
  w.meta("cap", fmt(c.cap));
  w.header({"x", "horizon", "runs", "n", "count", "pmf", "pmf_stderr", "cdf", "truncated", "no_hit", "seed"});
  for (double x : c.x) {
    const FptHistogram h =
        brute_force_histogram(model, x, c.horizon, static_cast<std::size_t>(c.cap), c.samples, c.seed, c.threads);
    for (int n = 0; n <= c.horizon; ++n) {
      w.row({fmt(x), fmt(c.horizon), fmt(h.runs), fmt(n), fmt(h.hits[static_cast<std::size_t>(n)]), fmt(h.pmf(n)),
             fmt(h.pmf_stderr(n)), fmt(h.range_prob(-1, n)), fmt(h.truncated), fmt(h.no_hit), fmt(c.seed)});
    }
  }
}

void cmd_omega_scan(const RunConfig& c, std::ostream& out) {
  const BrwModel model = make_model(c);
  const CramerProfile profile = lower_profile(c, model);
  CsvWriter w(out);
  w.meta("command", "omega-scan");
  write_config_meta(w, c);
  w.meta("omega_grid", join(c.omega_grid));
  write_profile_meta(w, profile);
  w.header({"omega", "R1", "R2", "R3", "R4", "R5", "w2", "w3", "w5", "x", "n", "t", "chat1", "estimate", "stderr", "N",
            "acceptance_rate", "truncations", "seed"});
  for (double omega : c.omega_grid) {
    for (double x : c.x) {
      const AlgoParams p = make_params(profile, model.dim, x, c.t, omega);
      const std::uint64_t N = samples_for(c, x);
      const BatchStats s = run_batch(model, profile, p, N, c.seed, batch_options(c));
      w.row({fmt(omega), fmt(p.R1), fmt(p.R2), fmt(p.R3), fmt(p.R4), fmt(p.R5), fmt(p.w2), fmt(p.w3), fmt(p.w5),
             fmt(x), fmt(p.n), fmt(p.t), fmt(profile.chat1), fmt(s.mean()), fmt(s.stderr_mean()), fmt(N),
             fmt(s.acceptance_rate()), fmt(s.truncated), fmt(c.seed)});
    }
  }
}

std::vector<FitResult> cmd_fit(const RunConfig& c, std::istream& in, std::ostream& out) {
  const BrwModel model = make_model(c);
  const CramerProfile profile = lower_profile(c, model);
  const CsvTable table = read_csv(in);
  const auto col_x = table.column("x");
  const auto col_est = table.column("estimate");
  if (!col_x || !col_est) throw ConfigLoadError(std::vector<FieldError>{{"input", "fit input needs 'x' and 'estimate' columns"}});
  const auto col_n = table.column("n");
  const auto col_omega = table.column("omega");

  // One fit per omega value when the input carries an omega column.
  std::map<double, std::vector<FitPoint>> groups;
  for (const auto& row : table.rows) {
    const double x = std::stod(row[*col_x]);
    const int n = col_n ? std::stoi(row[*col_n]) : static_cast<int>(std::floor(x / profile.chat1)) - c.t;
    const double omega = col_omega ? std::stod(row[*col_omega]) : c.omega;
    groups[omega].push_back({x, n, std::stod(row[*col_est])});
  }

  CsvWriter w(out);
  w.meta("command", "fit");
  write_config_meta(w, c);
  write_profile_meta(w, profile);
  w.header({"omega", "slope", "intercept", "beta", "residual_rms", "x_min", "x_max", "points"});
  std::vector<FitResult> results;
  for (const auto& [omega, points] : groups) {
    const FitResult f = fit_power_law(points, profile);
    w.row({fmt(omega), fmt(f.slope), fmt(f.intercept), fmt(f.beta), fmt(f.residual_rms), fmt(f.x_min), fmt(f.x_max),
           fmt(static_cast<std::uint64_t>(f.points))});
    results.push_back(f);
  }
  return results;
}

void cmd_upper_rate(const RunConfig& c, std::ostream& out) {
  const BrwModel model = make_model(c);
  const UpperDevProblem problem = make_upper_problem(model, c.chat1_factor);
  const UpperDevSolution sol = solve_T(problem);
  CsvWriter w(out);
  w.meta("command", "upper-rate");
  write_config_meta(w, c);
  w.header({"chat1", "T", "alpha_star", "active_constraint", "c1", "gamma", "chat1_factor", "feasible"});
  w.row({fmt(problem.chat1), fmt(sol.value), fmt(sol.alpha_star), fmt(sol.active_constraint), fmt(problem.c1),
         fmt(problem.gamma), fmt(c.chat1_factor), fmt(sol.feasible)});
}

void cmd_rate_info(const RunConfig& c, std::ostream& out) {
  const BrwModel model = make_model(c);
  CsvWriter w(out);
  w.meta("command", "rate-info");
  write_config_meta(w, c);
  w.header({"quantity", "value"});
  w.row({"rho", fmt(mean_offspring(model.offspring))});
  w.row({"extinction_q", fmt(extinction_prob(model.offspring))});
  w.row({"gamma", fmt(gamma_rate(model.offspring))});
  if (c.chat1_factor > 1.0) {
    const CramerProfile p = derive_profile(model, c.chat1_factor);
    w.row({"log_rho", fmt(p.log_rho)});
    w.row({"c1", fmt(p.c1)});
    w.row({"chat1", fmt(p.chat1)});
    w.row({"chat2", fmt(p.chat2)});
    w.row({"I_chat1", fmt(p.I_chat1)});
    w.row({"psi_chat2", fmt(p.psi_chat2)});
    w.row({"cbar1", fmt(p.cbar1)});
    w.row({"eps1", fmt(p.eps1)});
    w.row({"decay_rate_per_x", fmt((p.I_chat1 - p.log_rho) / p.chat1)});
    for (double x : c.x) {
      const AlgoParams a = make_params(p, model.dim, x, c.t, c.omega);
      const std::string tag = "x=" + fmt(x) + ":";
      w.row({tag + "n", fmt(a.n)});
      w.row({tag + "w2", fmt(a.w2)});
      w.row({tag + "w5", fmt(a.w5)});
    }
  } else {
    const double log_rho = std::log(mean_offspring(model.offspring));
    w.row({"log_rho", fmt(log_rho)});
    w.row({"c1", fmt(solve_c1(model.jump, log_rho))});
  }
}

}  // namespace brwfpt::cli
