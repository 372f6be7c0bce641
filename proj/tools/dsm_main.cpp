// dsm: command-line front end for the gallery solver.
// Subcommands: solve, sweep, verify-lemma, rate-table, gallery.
// Exit codes: 0 ok, 1 invalid config/parse error, 2 admissibility hard
// failure, 3 integrator failure, 4 I/O error, 5 certificate verification
// failed (verify-lemma only).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "dsm/dsm.hpp"
#include "dsm/log.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string gallery = "identity";
  int n = 2;
  std::uint64_t seed = 0;
  std::optional<double> r0, kappa, b, c2, c3, theta0;
  double spiral_rate = 0.0;
  double t_max = -1.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double tau = -1.0;
  std::string mode = "direct";
  int samples = 256;
  bool compute_w = true;
  bool compute_err_y = true;
  std::string out;
};

void apply_json(RunConfig& cfg, const json& j) {
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1) {
    throw std::invalid_argument("unsupported config schema_version");
  }
  auto opt_num = [&j](const char* key, std::optional<double>& slot) {
    if (j.contains(key) && !j.at(key).is_null()) slot = j.at(key).get<double>();
  };
  if (j.contains("gallery")) cfg.gallery = j.at("gallery").get<std::string>();
  if (j.contains("n")) cfg.n = j.at("n").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  opt_num("r0", cfg.r0);
  opt_num("kappa", cfg.kappa);
  opt_num("b", cfg.b);
  opt_num("c2", cfg.c2);
  opt_num("c3", cfg.c3);
  opt_num("theta0", cfg.theta0);
  if (j.contains("spiral_rate")) cfg.spiral_rate = j.at("spiral_rate").get<double>();
  if (j.contains("t_max")) cfg.t_max = j.at("t_max").get<double>();
  if (j.contains("rel_tol")) cfg.rel_tol = j.at("rel_tol").get<double>();
  if (j.contains("abs_tol")) cfg.abs_tol = j.at("abs_tol").get<double>();
  if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
  if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
  if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
  if (j.contains("compute_w")) cfg.compute_w = j.at("compute_w").get<bool>();
  if (j.contains("compute_err_y")) cfg.compute_err_y = j.at("compute_err_y").get<bool>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  return out.good();
}

int run_solve(const RunConfig& cfg) {
  if (cfg.mode != "direct" && cfg.mode != "psi") {
    std::cerr << "invalid mode '" << cfg.mode << "' (expected direct or psi)\n";
    return 1;
  }
  if (cfg.out.empty()) {
    std::cerr << "solve needs an output directory (--out)\n";
    return 1;
  }

  dsm::OperatorProblem problem;
  try {
    problem = dsm::make_gallery(cfg.gallery, cfg.n, cfg.seed);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (cfg.kappa) problem.holder.kappa = *cfg.kappa;
  if (cfg.b) problem.resolvent.b = *cfg.b;
  if (cfg.theta0) problem.resolvent.theta0 = *cfg.theta0;

  const dsm::Vector u0 = dsm::Vector::Zero(problem.dimension);
  dsm::PlanOptions popts;
  popts.r0_hint = cfg.r0;
  popts.c2_override = cfg.c2;
  popts.c3_override = cfg.c3;

  dsm::PlanResult plan;
  try {
    plan = dsm::plan_run(problem, u0, popts);
  } catch (const dsm::PlanError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "planning failed: " << e.what() << "\n";
    return 1;
  }
  plan.path.theta.spiral_rate = cfg.spiral_rate;

  dsm::DsmConfig dc;
  dc.rel_tol = cfg.rel_tol;
  dc.abs_tol = cfg.abs_tol;
  dc.t_max = cfg.t_max;
  dc.tau = cfg.tau;
  dc.samples = cfg.samples;
  dc.compute_w = cfg.compute_w;
  dc.compute_err_y = cfg.compute_err_y;
  dc.mode = cfg.mode == "psi" ? dsm::FlowMode::psi : dsm::FlowMode::direct;

  dsm::TrajectoryRecord rec;
  std::optional<dsm::BoundCheckReport> bound;
  try {
    rec = (dc.mode == dsm::FlowMode::psi) ? dsm::integrate_psi(problem, plan.path, u0, dc)
                                          : dsm::integrate(problem, plan.path, u0, dc);
    if (cfg.compute_w) {
      const bool has_g = std::any_of(rec.samples.begin(), rec.samples.end(),
                                     [](const auto& s) { return s.g.has_value(); });
      if (has_g) bound = dsm::verify_theorem_bound(rec, plan.path.schedule);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "integration failed: " << e.what() << "\n";
    return 3;
  }

  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << cfg.out << ": " << ec.message() << "\n";
    return 4;
  }
  std::ostringstream csv;
  dsm::write_trajectory_csv(csv, rec);
  const bool ok = write_file(fs::path(cfg.out) / "trajectory.csv", csv.str()) &&
                  write_file(fs::path(cfg.out) / "summary.json",
                             dsm::trajectory_summary_json(rec, bound ? &*bound : nullptr)) &&
                  write_file(fs::path(cfg.out) / "schedule.json",
                             dsm::schedule_report_json(plan));
  if (!ok) {
    std::cerr << "failed writing outputs under " << cfg.out << "\n";
    return 4;
  }

  if (rec.stop_reason == dsm::StopReason::step_underflow ||
      rec.stop_reason == dsm::StopReason::rhs_failure) {
    std::cerr << "integrator failure: " << rec.failure_context << "\n";
    return 3;
  }
  std::cout << "stop=" << dsm::to_string(rec.stop_reason) << " t=" << rec.t_stop
            << " discrepancy=" << rec.final_discrepancy;
  if (rec.final_err_y) std::cout << " err_y=" << *rec.final_err_y;
  std::cout << "\n";
  return 0;
}

int run_sweep(const std::string& config_path, int jobs_flag) {
  json j;
  try {
    j = load_json_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  RunConfig base;
  std::vector<std::pair<std::string, json>> runs;
  std::string out_root;
  int jobs = jobs_flag;
  try {
    if (j.contains("base")) apply_json(base, j.at("base"));
    out_root = j.value("out", std::string("sweep-out"));
    if (jobs <= 0) jobs = j.value("jobs", 0);
    for (const auto& r : j.at("runs")) {
      runs.emplace_back(r.at("name").get<std::string>(), r);
    }
  } catch (const std::exception& e) {
    std::cerr << "invalid sweep config: " << e.what() << "\n";
    return 1;
  }
  if (runs.empty()) {
    std::cerr << "sweep config lists no runs\n";
    return 1;
  }
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;

  std::vector<int> codes(runs.size(), -1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      RunConfig cfg = base;
      try {
        apply_json(cfg, runs[i].second);
      } catch (const std::exception&) {
        codes[i] = 1;
        continue;
      }
      cfg.out = (fs::path(out_root) / runs[i].first).string();
      codes[i] = run_solve(cfg);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<std::size_t>(jobs, runs.size());
  pool.reserve(nw);
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int rc = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::cout << runs[i].first << ": exit " << codes[i] << "\n";
    if (codes[i] != 0 && rc == 0) rc = codes[i];
  }
  return rc;
}

// Coefficient functions for verify-lemma spec files: a bare number or a
// piecewise-linear table {"type":"pwlinear","t":[...],"v":[...]}.
struct PwLinear {
  std::vector<double> t, v;
  double operator()(double x) const {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double s = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return v[i - 1] + s * (v[i] - v[i - 1]);
  }
  double slope(double x) const {
    if (x <= t.front() || x >= t.back()) return 0.0;
    auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    return (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
  }
};

std::function<double(double)> parse_coefficient(const json& j, const char* name,
                                                std::function<double(double)>* derivative) {
  if (j.is_number()) {
    const double c = j.get<double>();
    if (derivative) *derivative = [](double) { return 0.0; };
    return [c](double) { return c; };
  }
  if (j.is_object() && j.value("type", "") == "pwlinear") {
    PwLinear pw{j.at("t").get<std::vector<double>>(), j.at("v").get<std::vector<double>>()};
    if (pw.t.size() != pw.v.size() || pw.t.size() < 2) {
      throw std::invalid_argument(std::string(name) + ": pwlinear needs matching t/v, size >= 2");
    }
    for (std::size_t i = 1; i < pw.t.size(); ++i) {
      if (!(pw.t[i] > pw.t[i - 1])) {
        throw std::invalid_argument(std::string(name) + ": pwlinear times must increase");
      }
    }
    if (derivative) {
      PwLinear copy = pw;
      *derivative = [copy](double x) { return copy.slope(x); };
    }
    return [pw](double x) { return pw(x); };
  }
  throw std::invalid_argument(std::string(name) + ": expected a number or a pwlinear object");
}

int run_verify_lemma(const std::string& spec_path, double t_end_flag, long steps_flag,
                     int grid_points, const std::string& out_path) {
  json j;
  dsm::MajorantSpec spec;
  double t_end = t_end_flag;
  long steps = steps_flag;
  try {
    j = load_json_file(spec_path);
    const std::string family = j.value("family", "coefficients");
    if (family == "coefficients") {
      spec.gamma = parse_coefficient(j.at("gamma"), "gamma", nullptr);
      spec.alpha = parse_coefficient(j.at("alpha"), "alpha", nullptr);
      spec.beta = parse_coefficient(j.at("beta"), "beta", nullptr);
      std::function<double(double)> mu_slope;
      spec.mu = parse_coefficient(j.at("mu"), "mu", &mu_slope);
      spec.mu_dot = j.contains("mu_dot")
                        ? parse_coefficient(j.at("mu_dot"), "mu_dot", nullptr)
                        : mu_slope;
      spec.p = j.at("p").get<double>();
      spec.g0 = j.at("g0").get<double>();
    } else if (family == "schedule") {
      json sj;
      if (j.contains("schedule_file")) {
        sj = load_json_file(j.at("schedule_file").get<std::string>()).at("inputs");
      } else {
        sj = j.at("schedule");
      }
      dsm::ScheduleInputs in{sj.at("kappa").get<double>(), sj.at("b").get<double>(),
                             sj.at("c2").get<double>(),    sj.at("c3").get<double>(),
                             sj.at("r0").get<double>(),    sj.at("g0").get<double>()};
      spec = dsm::build_schedule_certificate(dsm::derive_schedule(in),
                                             j.value("alpha_uses_w_bound_constant", false));
    } else {
      throw std::invalid_argument("unknown family '" + family + "'");
    }
    if (j.contains("t_end")) t_end = j.at("t_end").get<double>();
    if (j.contains("steps")) steps = j.at("steps").get<long>();
  } catch (const std::exception& e) {
    std::cerr << "cannot parse " << spec_path << ": " << e.what() << "\n";
    return 1;
  }

  try {
    auto grid = dsm::log_spaced_grid(t_end, grid_points + 1);
    auto cond = dsm::verify_conditions(spec, grid);
    auto cmp = dsm::integrate_comparison(spec, t_end, steps);
    const std::string report = dsm::certificate_report_json(cond, &cmp);
    if (out_path.empty()) {
      std::cout << report;
    } else if (!write_file(out_path, report)) {
      std::cerr << "failed writing " << out_path << "\n";
      return 4;
    }
    return (cond.cond9_ok && cond.cond10_ok && cmp.bound_ok) ? 0 : 5;
  } catch (const std::exception& e) {
    std::cerr << "verification aborted: " << e.what() << "\n";
    return 5;
  }
}

struct CsvRow {
  double t = 0, r = 0;
  std::optional<double> g, err_y;
};

std::vector<CsvRow> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 6) continue;
    CsvRow row;
    row.t = std::stod(fields[0]);
    row.r = std::stod(fields[1]);
    if (!fields[3].empty()) row.g = std::stod(fields[3]);
    if (!fields[4].empty()) row.err_y = std::stod(fields[4]);
    rows.push_back(row);
  }
  return rows;
}

int run_rate_table(const std::vector<std::string>& summaries, const std::string& csv_out) {
  struct Row {
    std::string run;
    double k_theory, k_observed, final_err;
  };
  std::vector<Row> rows;
  for (const std::string& spath : summaries) {
    const fs::path dir = fs::path(spath).parent_path();
    try {
      json summary = load_json_file(spath);
      if (!summary.contains("final_err_y") || summary.at("final_err_y").is_null()) {
        std::cerr << "note: " << spath << " lacks err_y (no known solution); skipped\n";
        continue;
      }
      json schedule = load_json_file((dir / "schedule.json").string());
      const double k_theory = schedule.at("derived").at("k").get<double>();
      auto traj = read_trajectory_csv(dir / "trajectory.csv");

      // tail window: last decade of r
      double r_min = std::numeric_limits<double>::infinity();
      for (const auto& r : traj) r_min = std::min(r_min, r.r);
      std::vector<double> xs, ys;
      bool used_err_y = false;
      for (const auto& row : traj) {
        if (row.r > 10.0 * r_min) continue;
        std::optional<double> val = row.g ? row.g : row.err_y;
        if (!row.g) used_err_y = true;
        if (val && *val > 0.0) {
          xs.push_back(std::log(row.r));
          ys.push_back(std::log(*val));
        }
      }
      if (xs.size() < 3) {
        std::cerr << "note: " << spath << " has too few tail samples; skipped\n";
        continue;
      }
      if (used_err_y) {
        std::cerr << "note: " << spath << " fitted on err_y (no g column)\n";
      }
      const dsm::LineFit fit = dsm::fit_line(xs, ys);
      rows.push_back(
          {dir.filename().string(), k_theory, fit.slope,
           summary.at("final_err_y").get<double>()});
    } catch (const std::exception& e) {
      std::cerr << "note: skipping " << spath << ": " << e.what() << "\n";
    }
  }
  if (rows.size() < 2) {
    std::cerr << "rate-table needs at least two usable summaries\n";
    return 1;
  }
  std::ostringstream csv;
  csv << "run,k_theory,k_observed,final_err\n";
  std::cout << "run            k_theory   k_observed   final_err\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-14s %8.4g   %10.4g   %9.4g", r.run.c_str(), r.k_theory,
                  r.k_observed, r.final_err);
    std::cout << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g", r.run.c_str(), r.k_theory,
                  r.k_observed, r.final_err);
    csv << buf << "\n";
  }
  if (!csv_out.empty() && !write_file(csv_out, csv.str())) {
    std::cerr << "failed writing " << csv_out << "\n";
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized-flow gallery solver"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "plan, integrate and export one gallery run");
  RunConfig cfg;
  std::string config_path;
  solve->add_option("--config", config_path, "JSON config file (flags override it)");
  solve->add_option("--gallery", cfg.gallery, "gallery id");
  solve->add_option("--n", cfg.n, "problem dimension");
  solve->add_option("--seed", cfg.seed, "gallery seed");
  double r0 = 0, kappa = 0, b = 0, c2 = 0, c3 = 0, theta0 = 0;
  solve->add_option("--r0", r0, "initial path modulus hint");
  solve->add_option("--kappa", kappa, "override the Hoelder exponent");
  solve->add_option("--b", b, "override the resolvent exponent");
  solve->add_option("--c2", c2, "override the w-bound constant");
  solve->add_option("--c3", c3, "override the Hoelder-resolvent constant");
  solve->add_option("--theta0", theta0, "ray argument of the path");
  solve->add_option("--spiral-rate", cfg.spiral_rate, "angular rate of a spiral path");
  solve->add_option("--t-max", cfg.t_max, "integration horizon (<=0: r drops to 1e-4 r0)");
  solve->add_option("--tol", cfg.rel_tol, "integrator relative tolerance");
  solve->add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance");
  solve->add_option("--tau", cfg.tau, "discrepancy stop (<0: default, 0: disabled)");
  solve->add_option("--mode", cfg.mode, "direct or psi");
  solve->add_option("--samples", cfg.samples, "diagnostic sample count");
  bool no_w = false, no_err_y = false;
  solve->add_flag("--no-w", no_w, "skip the w-distance diagnostic");
  solve->add_flag("--no-err-y", no_err_y, "skip the known-solution diagnostic");
  solve->add_option("--out", cfg.out, "output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a batch of solve configs in a worker pool");
  std::string sweep_config;
  int jobs = 0;
  sweep->add_option("--config", sweep_config, "sweep JSON file")->required();
  sweep->add_option("--jobs", jobs, "worker count (default: hardware threads)");

  // verify-lemma
  auto* verify = app.add_subcommand("verify-lemma", "check a majorant certificate");
  std::string spec_path, report_out;
  double t_end = 100.0;
  long steps = 200000;
  int grid_points = 2048;
  verify->add_option("spec", spec_path, "certificate spec JSON")->required();
  verify->add_option("--t-end", t_end, "verification horizon");
  verify->add_option("--steps", steps, "comparison-ODE steps");
  verify->add_option("--grid-points", grid_points, "condition-check grid size");
  verify->add_option("--out", report_out, "write the report here instead of stdout");

  // rate-table
  auto* rate = app.add_subcommand("rate-table", "empirical decay exponents across runs");
  std::vector<std::string> summaries;
  std::string csv_out;
  rate->add_option("summaries", summaries, "summary.json paths")->required();
  rate->add_option("--csv", csv_out, "also write the table as CSV");

  // gallery
  auto* gal = app.add_subcommand("gallery", "list gallery problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  if (app.got_subcommand(solve)) {
    if (!config_path.empty()) {
      RunConfig from_file;
      try {
        apply_json(from_file, load_json_file(config_path));
      } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 1;
      }
      // flags given on the command line win over file values
      RunConfig merged = from_file;
      if (solve->count("--gallery")) merged.gallery = cfg.gallery;
      if (solve->count("--n")) merged.n = cfg.n;
      if (solve->count("--seed")) merged.seed = cfg.seed;
      if (solve->count("--spiral-rate")) merged.spiral_rate = cfg.spiral_rate;
      if (solve->count("--t-max")) merged.t_max = cfg.t_max;
      if (solve->count("--tol")) merged.rel_tol = cfg.rel_tol;
      if (solve->count("--abs-tol")) merged.abs_tol = cfg.abs_tol;
      if (solve->count("--tau")) merged.tau = cfg.tau;
      if (solve->count("--mode")) merged.mode = cfg.mode;
      if (solve->count("--samples")) merged.samples = cfg.samples;
      if (solve->count("--out")) merged.out = cfg.out;
      cfg = merged;
    }
    if (solve->count("--r0")) cfg.r0 = r0;
    if (solve->count("--kappa")) cfg.kappa = kappa;
    if (solve->count("--b")) cfg.b = b;
    if (solve->count("--c2")) cfg.c2 = c2;
    if (solve->count("--c3")) cfg.c3 = c3;
    if (solve->count("--theta0")) cfg.theta0 = theta0;
    if (no_w) cfg.compute_w = false;
    if (no_err_y) cfg.compute_err_y = false;
    return run_solve(cfg);
  }
  if (app.got_subcommand(sweep)) return run_sweep(sweep_config, jobs);
  if (app.got_subcommand(verify)) {
    return run_verify_lemma(spec_path, t_end, steps, grid_points, report_out);
  }
  if (app.got_subcommand(rate)) return run_rate_table(summaries, csv_out);
  if (app.got_subcommand(gal)) {
    std::cout << dsm::gallery_manifest_json();
    return 0;
  }
  return 1;
}
