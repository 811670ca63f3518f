// semlearn CLI: batch front-end over the analysis library. One subcommand
// per analysis, parameter sweeps over grids, deterministic CSV/JSON output.
//
// Exit codes: 0 ok, 1 a solve failed to converge (output still written with
// a status column), 2 bad flags.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semlearn/compression.hpp"
#include "semlearn/density_evolution.hpp"
#include "semlearn/hierarchy.hpp"
#include "semlearn/parallel.hpp"
#include "semlearn/peeling_sim.hpp"
#include "semlearn/percolation.hpp"

namespace {

using nlohmann::ordered_json;
using namespace semlearn;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<ordered_json>> rows;

  void add_row(std::vector<ordered_json> row) { rows.push_back(std::move(row)); }
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << t.header[i] << (i + 1 == t.header.size() ? "" : ",");
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& cell = row[i];
      if (cell.is_number_float())
        out << fmt_double(cell.get<double>());
      else if (cell.is_string())
        out << cell.get<std::string>();
      else
        out << cell.dump();
      out << (i + 1 == row.size() ? "" : ",");
    }
    out << "\n";
  }
}

void write_json(const Table& t, std::ostream& out) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.header[i]] = row[i];
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << "\n";
}

struct OutputOptions {
  std::string path;            // empty = stdout
  std::string format = "csv";  // csv | json
};

// Registers --config and lets unrecognized flags (e.g. a global --threads
// given after the subcommand) fall through to the parent parser.
void add_config_flag(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path,
                  "key=value file, one pair per line; command-line flags "
                  "take precedence");
  cmd->fallthrough();
}

// Expands "--config FILE" by appending one "--key value" pair per config
// line whose key was not already given on the command line.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  std::ifstream f(file);
  if (!f) throw CLI::FileError::Missing(file);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args)
      given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    args.push_back(flag);
    if (value != "true") args.push_back(value);
  }
  return args;
}

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--out", out.path,
                  "output file (default stdout; bare names resolve under "
                  "$SEMLEARN_OUT_DIR when set)");
  cmd->add_option("--format", out.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

int emit(const Table& t, const OutputOptions& opt) {
  std::string path = opt.path;
  if (!path.empty() && path.find('/') == std::string::npos) {
    if (const char* dir = std::getenv("SEMLEARN_OUT_DIR")) {
      std::filesystem::create_directories(dir);
      path = std::string(dir) + "/" + path;
    }
  }
  std::ostringstream body;
  if (opt.format == "json")
    write_json(t, body);
  else
    write_csv(t, body);
  if (path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot open " << path << "\n";
      return 1;
    }
    f << body.str();
    std::cout << "wrote " << path << " (" << t.rows.size() << " rows)\n";
  }
  return 0;
}

struct LearnerOptions {
  std::string name = "one-skill";
  int capacity = 1;
};

void add_learner_flags(CLI::App* cmd, LearnerOptions& opt) {
  cmd->add_option("--learner", opt.name, "one-skill, two-skill or d-skill")
      ->check(CLI::IsMember({"one-skill", "two-skill", "d-skill"}));
  cmd->add_option("--capacity", opt.capacity,
                  "novel-skill capacity for --learner d-skill");
}

SuccessProfile make_profile(const LearnerOptions& opt, int num_classes = 1) {
  if (opt.name == "one-skill") return SuccessProfile::one_skill(num_classes);
  if (opt.name == "two-skill") return SuccessProfile::d_skill(2, num_classes);
  return SuccessProfile::d_skill(opt.capacity, num_classes);
}

PsiFunction make_psi(const LearnerOptions& opt, int num_classes = 1) {
  if (opt.name == "one-skill") return PsiFunction::d_skill(1, num_classes);
  if (opt.name == "two-skill") return PsiFunction::d_skill(2, num_classes);
  return PsiFunction::d_skill(opt.capacity, num_classes);
}

struct GridSpec {
  double min = 0.0, max = 0.0, step = 0.0;
  bool set = false;
  std::vector<double> values(double fallback) const {
    if (!set) return {fallback};
    std::vector<double> v;
    for (double x = min; x <= max + 1e-9; x += step) v.push_back(x);
    return v;
  }
};

void add_grid(CLI::App* cmd, const std::string& name, GridSpec& g,
              const std::string& what) {
  auto* mn = cmd->add_option("--" + name + "-min", g.min, what + " grid start");
  cmd->add_option("--" + name + "-max", g.max, what + " grid stop")->needs(mn);
  cmd->add_option("--" + name + "-step", g.step, what + " grid step")
      ->needs(mn)
      ->check(CLI::PositiveNumber);
  mn->each([&g](const std::string&) { g.set = true; });
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::istringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& spec) {
  std::vector<std::vector<double>> out;
  std::istringstream ss(spec);
  std::string row;
  while (std::getline(ss, row, ';')) out.push_back(parse_list(row));
  return out;
}

const char* status_of(bool converged) { return converged ? "ok" : "noconv"; }

// ---------------------------------------------------------------- de

int run_de(const std::vector<double>& cs, const GridSpec& Rgrid, double R_one,
           const LearnerOptions& learner, const std::string& profile_csv,
           const DESettings& settings, const OutputOptions& out_opt,
           int threads) {
  SuccessProfile profile = make_profile(learner);
  if (!profile_csv.empty()) {
    std::ifstream f(profile_csv);
    if (!f) throw std::invalid_argument("cannot open " + profile_csv);
    profile = SuccessProfile::from_csv(f, 1);
  }
  auto Rs = Rgrid.values(R_one);
  Table t;
  t.header = {"c", "R", "p", "q", "zeta", "epsilon", "iterations", "status"};
  std::vector<std::vector<ordered_json>> rows(cs.size() * Rs.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    double c = cs[i / Rs.size()];
    double R = Rs[i % Rs.size()];
    auto r = de_solve_single(c, R, profile, settings);
    rows[i] = {c,
               R,
               r.p1(),
               r.q[0],
               r.zeta1(),
               r.epsilon,
               r.iterations_used,
               status_of(r.converged)};
  });
  bool ok = true;
  for (auto& row : rows) {
    ok = ok && row.back().get<std::string>() == "ok";
    t.add_row(std::move(row));
  }
  int rc = emit(t, out_opt);
  return rc != 0 ? rc : (ok ? 0 : 1);
}

// ---------------------------------------------------------------- simulate

int run_simulate(double c, const GridSpec& Rgrid, double R_one,
                 std::uint32_t skills, std::uint32_t total_nodes, int trials,
                 std::uint32_t test_texts, const LearnerOptions& learner,
                 bool dedup, std::uint64_t seed, const OutputOptions& out_opt,
                 int threads) {
  auto profile = make_profile(learner);
  auto psi = make_psi(learner);
  Table t;
  t.header = {"c",           "R",
              "skills",      "texts",
              "trials",      "zeta_sim",
              "zeta_stderr", "zeta",
              "epsilon_sim", "epsilon_stderr",
              "epsilon",     "status"};
  bool ok = true;
  for (double R : Rgrid.values(R_one)) {
    SingleClassConfig cfg;
    cfg.num_skills =
        total_nodes > 0
            ? static_cast<std::uint32_t>(std::llround(total_nodes / (1.0 + R)))
            : skills;
    cfg.ratio_R = R;
    cfg.mean_skills_per_text = c;
    cfg.seed = seed;
    ScnsOptions opts;
    opts.dedup = dedup;
    auto de = de_solve_single(c, R, profile);
    auto zf = empirical_learned_fraction(cfg, psi, trials, opts, threads);
    auto te =
        empirical_testing_error(cfg, psi, trials, test_texts, opts, threads);
    ok = ok && de.converged;
    t.add_row({c, R, cfg.num_skills, cfg.num_texts(), trials, zf.mean,
               zf.stderr_, de.zeta1(), te.mean, te.stderr_, de.epsilon,
               status_of(de.converged)});
  }
  int rc = emit(t, out_opt);
  return rc != 0 ? rc : (ok ? 0 : 1);
}

// ---------------------------------------------------------------- percolation

int run_percolation(const std::vector<double>& cs, const GridSpec& Rgrid,
                    double R_one, const LearnerOptions& learner,
                    const std::string& mode, std::uint32_t total_nodes,
                    int trials, std::uint64_t seed,
                    const OutputOptions& out_opt, int threads) {
  auto profile = make_profile(learner);
  auto psi = make_psi(learner);
  Table t;
  const bool sim = mode != "theory";
  t.header = {"c",   "R",   "zeta",            "mu_s",
              "mu_t", "p_G", "condition_value", "giant_exists"};
  if (sim) {
    t.header.emplace_back("p_G_sim");
    t.header.emplace_back("p_G_stderr");
  }
  t.header.emplace_back("status");
  for (double c : cs) {
    for (double R : Rgrid.values(R_one)) {
      auto r = p_giant_theory(c, R, profile);
      std::vector<ordered_json> row = {c,      R,      r.zeta,
                                       r.mu_s, r.mu_t, r.p_G,
                                       r.condition_value, r.giant_exists};
      if (sim) {
        SingleClassConfig cfg;
        cfg.num_skills =
            static_cast<std::uint32_t>(std::llround(total_nodes / (1.0 + R)));
        cfg.ratio_R = R;
        cfg.mean_skills_per_text = c;
        cfg.seed = seed;
        auto s = giant_component_sim(cfg, psi, profile, trials,
                                     mode == "sim-iid"
                                         ? GiantSimMode::IidZeta
                                         : GiantSimMode::ActualLearned,
                                     threads);
        row.emplace_back(s.mean);
        row.emplace_back(s.stderr_);
      }
      row.emplace_back("ok");
      t.add_row(std::move(row));
    }
  }
  return emit(t, out_opt);
}

// ---------------------------------------------------------------- region

int run_region(double cmin, double cmax, double rmin, double rmax, double step,
               const LearnerOptions& learner, const OutputOptions& out_opt,
               const std::string& thresholds_out, int threads) {
  auto profile = make_profile(learner);
  auto scan = region_scan(cmin, cmax, rmin, rmax, step, profile, {}, threads);
  Table t;
  t.header = {"c", "R", "condition_value", "giant_exists"};
  for (const auto& cell : scan.cells)
    t.add_row({cell.c, cell.R, cell.condition_value, cell.giant_exists});
  int rc = emit(t, out_opt);
  if (!thresholds_out.empty()) {
    Table th;
    th.header = {"c", "R_threshold"};
    for (const auto& [c, thr] : scan.threshold_by_c)
      th.add_row({c, thr ? ordered_json(*thr) : ordered_json("none")});
    OutputOptions o2;
    o2.path = thresholds_out;
    o2.format = out_opt.format;
    int rc2 = emit(th, o2);
    rc = rc != 0 ? rc : rc2;
  }
  if (scan.min_R)
    std::cout << "minimum R for a giant component: R="
              << fmt_double(*scan.min_R) << " at c=" << fmt_double(*scan.min_c)
              << "\n";
  else
    std::cout << "no giant component anywhere in the scanned region\n";
  return rc;
}

// ---------------------------------------------------------------- hierarchy

int run_hierarchy(double c, const GridSpec& Rgrid, double R_one, double cf,
                  const GridSpec& Rfgrid, double Rf_one, double prereq_mean,
                  const std::string& prereq_coeffs,
                  const LearnerOptions& learner, const OutputOptions& out_opt,
                  int threads) {
  auto profile = make_profile(learner);
  PrereqPgf pgf = prereq_coeffs.empty()
                      ? PrereqPgf::poisson(prereq_mean)
                      : PrereqPgf::explicit_coeffs(parse_list(prereq_coeffs));
  auto Rs = Rgrid.values(R_one);
  auto Rfs = Rfgrid.values(Rf_one);
  Table t;
  t.header = {"R",      "R_f",       "zeta", "Lambda_f", "p_f",
              "zeta_f", "epsilon_f", "status"};
  std::vector<std::vector<ordered_json>> rows(Rs.size() * Rfs.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    double R = Rs[i / Rfs.size()];
    double Rf = Rfs[i % Rfs.size()];
    HierarchyConfig cfg;
    cfg.basic = {1000, R, c, 0};
    cfg.num_domain_skills = 1000;
    cfg.ratio_Rf = Rf;
    cfg.mean_domain_skills_per_text = cf;
    cfg.prereq = pgf;
    auto r = fine_tune_solve(cfg, profile);
    rows[i] = {R,     Rf,       r.zeta_basic, r.lambda_f_at_zeta,
               r.p_f, r.zeta_f, r.epsilon_f,  status_of(r.converged)};
  });
  bool ok = true;
  for (auto& row : rows) {
    ok = ok && row.back().get<std::string>() == "ok";
    t.add_row(std::move(row));
  }
  int rc = emit(t, out_opt);
  return rc != 0 ? rc : (ok ? 0 : 1);
}

// ---------------------------------------------------------------- multiclass

int run_multiclass(const GridSpec& Rgrid, double R_one,
                   const std::string& alpha_spec, const std::string& beta_spec,
                   const std::string& c_matrix_spec, const std::string& mode,
                   double c1, double c2, const std::string& beta_list,
                   const DESettings& settings, const OutputOptions& out_opt) {
  Table t;
  bool ok = true;
  if (mode == "coupled-near-far") {
    t.header = {"R",      "beta",   "p_1",       "p_2",       "zeta_1",
                "zeta_2", "epsilon_1", "epsilon_2", "status"};
    for (double beta : parse_list(beta_list)) {
      for (double R : Rgrid.values(R_one)) {
        auto r = de_solve_near_far_coupled(c1, c2, beta, R, settings);
        ok = ok && r.converged;
        t.add_row({R, beta, r.p1, r.p2, r.zeta1, r.zeta2, r.epsilon1,
                   r.epsilon2, status_of(r.converged)});
      }
    }
  } else {
    MultiClassMeans means;
    means.alpha = parse_list(alpha_spec);
    means.beta = parse_list(beta_spec);
    means.c = parse_matrix(c_matrix_spec);
    auto K = static_cast<int>(means.beta.size());
    SuccessProfile profile = mode == "near-far"
                                 ? SuccessProfile::near_far()
                                 : SuccessProfile::one_skill(K);
    t.header = {"R",     "class",         "p",       "q",
                "zeta",  "epsilon_class", "epsilon", "status"};
    for (double R : Rgrid.values(R_one)) {
      means.ratio_R = R;
      auto r = de_solve_multi(means, profile, settings);
      ok = ok && r.converged;
      for (std::size_t k = 0; k < means.beta.size(); ++k) {
        t.add_row({R, k + 1, r.p[k], r.q[k], r.zeta[k],
                   r.epsilon_by_skill_class[k], r.epsilon,
                   status_of(r.converged)});
      }
    }
  }
  int rc = emit(t, out_opt);
  return rc != 0 ? rc : (ok ? 0 : 1);
}

// ---------------------------------------------------------------- compress

int run_compress(std::uint64_t skills, double c, double R, double z,
                 const LearnerOptions& learner, std::uint64_t corpus,
                 std::uint64_t seed, const OutputOptions& out_opt) {
  CodecConfig cfg;
  cfg.num_skills = skills;
  cfg.c = c;
  cfg.R = R;
  cfg.profile = make_profile(learner);
  cfg.lossless_bits_per_text = z;
  auto exp = expected_bits(cfg);
  Table t;
  t.header = {"skills", "c",    "R", "z", "expected_bits",
              "zeta",   "understood_prob", "degenerate"};
  std::vector<ordered_json> row = {skills,   c,
                                   R,        z,
                                   exp.bits, exp.zeta,
                                   exp.understood_prob, exp.degenerate};
  if (corpus > 0) {
    for (const char* col :
         {"catalog_size", "measured_payload_bits", "measured_total_bits",
          "understood_fraction_sim", "mean_raw_bits_fallback"})
      t.header.emplace_back(col);
    SingleClassConfig g;
    g.num_skills = static_cast<std::uint32_t>(skills);
    g.ratio_R = R;
    g.mean_skills_per_text = c;
    g.seed = seed;
    auto psi = make_psi(learner);
    auto outcome = run_scns(sample_single_class(g), psi);
    Catalog catalog(outcome.learned);
    auto stats = measure_corpus(catalog, g.num_skills, c, seed + 1, corpus);
    row.emplace_back(catalog.size());
    row.emplace_back(stats.mean_payload_bits);
    row.emplace_back(stats.mean_total_bits);
    row.emplace_back(stats.understood_fraction);
    row.emplace_back(stats.mean_raw_bits_fallback);
  }
  t.header.emplace_back("status");
  row.emplace_back("ok");
  t.add_row(std::move(row));
  return emit(t, out_opt);
}

// ---------------------------------------------------------------- figures

int run_figure(int n, std::uint64_t seed, int trials, int threads,
               OutputOptions out_opt) {
  LearnerOptions one{"one-skill", 1};
  LearnerOptions two{"two-skill", 2};
  auto default_out = [&](const char* name) {
    if (out_opt.path.empty()) out_opt.path = name;
  };
  switch (n) {
    case 5: {  // testing error vs R, 1-skill, c = 1..5, 10k iterations
      default_out("figure5.csv");
      GridSpec g{0.1, 5.0, 0.01, true};
      return run_de({1, 2, 3, 4, 5}, g, 0, one, "", {}, out_opt, threads);
    }
    case 6: {  // testing error vs R, 2-skill
      default_out("figure6.csv");
      GridSpec g{0.1, 3.0, 0.01, true};
      return run_de({1, 2, 3, 4, 5}, g, 0, two, "", {}, out_opt, threads);
    }
    case 7: {  // p_G vs R, theory + peeling simulation, 20k total nodes
      default_out("figure7.csv");
      GridSpec g{0.1, 5.0, 0.1, true};
      return run_percolation({1, 2, 3, 4, 5}, g, 0, one, "sim-actual", 20000,
                             trials, seed, out_opt, threads);
    }
    case 8: {  // g_1 intersections for c=3, R in {0.5, 1, 1.5}
      default_out("figure8.csv");
      auto profile = make_profile(one);
      Table t;
      t.header = {"c", "R", "x", "g_1", "mu_s", "zeta", "status"};
      for (double R : {0.5, 1.0, 1.5}) {
        auto r = p_giant_theory(3.0, R, profile);
        for (int i = 0; i <= 100; ++i) {
          double x = i / 100.0;
          double g1 = std::exp(-3.0 * r.zeta *
                               (1.0 - std::exp(-R * 3.0 * (1.0 - x))));
          t.add_row({3.0, R, x, g1, r.mu_s, r.zeta, "ok"});
        }
      }
      return emit(t, out_opt);
    }
    case 9: {  // epsilon_f contour over (R, R_f), c = c_f = 3, Poisson-3
      default_out("figure9.csv");
      Table t;
      t.header = {"R", "R_f", "epsilon_f"};
      GridSpec g{0.05, 3.0, 0.05, true};
      auto profile = make_profile(one);
      auto Rs = g.values(0);
      std::vector<std::vector<ordered_json>> rows(Rs.size() * Rs.size());
      parallel_for(rows.size(), threads, [&](std::size_t i) {
        HierarchyConfig cfg;
        cfg.basic = {1000, Rs[i / Rs.size()], 3.0, 0};
        cfg.num_domain_skills = 1000;
        cfg.ratio_Rf = Rs[i % Rs.size()];
        cfg.mean_domain_skills_per_text = 3.0;
        cfg.prereq = PrereqPgf::poisson(3.0);
        auto r = fine_tune_solve(cfg, profile);
        rows[i] = {Rs[i / Rs.size()], Rs[i % Rs.size()], r.epsilon_f};
      });
      for (auto& row : rows) t.add_row(std::move(row));
      return emit(t, out_opt);
    }
    case 10: {  // coupled near-far thresholds, c1=3, c2=7
      default_out("figure10.csv");
      GridSpec g{0.1, 10.0, 0.05, true};
      return run_multiclass(g, 0, "", "", "", "coupled-near-far", 3.0, 7.0,
                            "0.1,0.3,0.5,0.7,0.9", {}, out_opt);
    }
    default:
      std::cerr << "error: no preset for figure " << n
                << " (supported: 5..10)\n";
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "analysis and simulation toolkit for skill-text bipartite graph "
      "learning"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = available parallelism)");
  std::string config_path;

  // de
  auto* de = app.add_subcommand("de", "single-class density evolution");
  std::string de_cs = "3";
  GridSpec de_R;
  double de_R_one = 1.0;
  LearnerOptions de_learner;
  DESettings de_settings;
  OutputOptions de_out;
  de->add_option("--c", de_cs, "comma-separated list of c values");
  de->add_option("--R", de_R_one, "single R value");
  add_grid(de, "R", de_R, "R");
  add_learner_flags(de, de_learner);
  de->add_option("--max-iter", de_settings.max_iter, "iteration budget");
  de->add_option("--tol", de_settings.tol, "convergence tolerance");
  std::string de_profile_csv;
  de->add_option("--profile-csv", de_profile_csv,
                 "tabulated success profile (rho_1,psuc_1 rows)");
  add_output_flags(de, de_out);
  add_config_flag(de, config_path);

  // simulate
  auto* sim = app.add_subcommand("simulate", "peeling simulation vs theory");
  double sim_c = 3.0;
  GridSpec sim_R;
  double sim_R_one = 2.0;
  std::uint32_t sim_skills = 10000, sim_total = 0, sim_test_texts = 10000;
  int sim_trials = 100;
  std::uint64_t sim_seed = 1;
  bool sim_no_dedup = false;
  LearnerOptions sim_learner;
  OutputOptions sim_out;
  sim->add_option("--c", sim_c, "mean skills per text");
  sim->add_option("--R", sim_R_one, "single R value");
  add_grid(sim, "R", sim_R, "R");
  sim->add_option("--skills", sim_skills, "number of skill nodes |S|");
  sim->add_option("--total-nodes", sim_total,
                  "fix |S|+|D| instead of |S| (overrides --skills)");
  sim->add_option("--trials", sim_trials, "independent graphs per point");
  sim->add_option("--test-texts", sim_test_texts,
                  "fresh test texts per trial");
  sim->add_option("--seed", sim_seed, "root seed");
  sim->add_flag("--no-dedup", sim_no_dedup,
                "count parallel edges toward novel-skill loads");
  add_learner_flags(sim, sim_learner);
  add_output_flags(sim, sim_out);
  add_config_flag(sim, config_path);

  // percolation
  auto* perc =
      app.add_subcommand("percolation", "association-graph giant component");
  std::string perc_cs = "3";
  GridSpec perc_R;
  double perc_R_one = 1.5;
  std::string perc_mode = "theory";
  std::uint32_t perc_total = 20000;
  int perc_trials = 100;
  std::uint64_t perc_seed = 1;
  LearnerOptions perc_learner;
  OutputOptions perc_out;
  perc->add_option("--c", perc_cs, "comma-separated list of c values");
  perc->add_option("--R", perc_R_one, "single R value");
  add_grid(perc, "R", perc_R, "R");
  perc->add_option("--mode", perc_mode, "theory, sim-iid or sim-actual")
      ->check(CLI::IsMember({"theory", "sim-iid", "sim-actual"}));
  perc->add_option("--total-nodes", perc_total, "|S|+|D| for simulation");
  perc->add_option("--trials", perc_trials, "graphs per simulated point");
  perc->add_option("--seed", perc_seed, "root seed");
  add_learner_flags(perc, perc_learner);
  add_output_flags(perc, perc_out);
  add_config_flag(perc, config_path);

  // region
  auto* region = app.add_subcommand("region", "giant-component region scan");
  double rg_cmin = 0.5, rg_cmax = 5.0, rg_rmin = 0.5, rg_rmax = 3.0,
         rg_step = 0.01;
  std::string rg_thresholds;
  LearnerOptions rg_learner;
  OutputOptions rg_out;
  region->add_option("--cmin", rg_cmin, "c grid start");
  region->add_option("--cmax", rg_cmax, "c grid stop");
  region->add_option("--rmin", rg_rmin, "R grid start");
  region->add_option("--rmax", rg_rmax, "R grid stop");
  region->add_option("--step", rg_step, "grid step")
      ->check(CLI::PositiveNumber);
  region->add_option("--thresholds-out", rg_thresholds,
                     "also write per-c giant thresholds to this file");
  add_learner_flags(region, rg_learner);
  add_output_flags(region, rg_out);
  add_config_flag(region, config_path);

  // hierarchy
  auto* hier =
      app.add_subcommand("hierarchy", "foundation + fine-tuning testing error");
  double h_c = 3.0, h_cf = 3.0, h_R_one = 2.0, h_Rf_one = 2.0,
         h_prereq_mean = 3.0;
  GridSpec h_R, h_Rf;
  std::string h_prereq_coeffs;
  LearnerOptions h_learner;
  OutputOptions h_out;
  hier->add_option("--c", h_c, "basic mean skills per text");
  hier->add_option("--cf", h_cf, "domain mean skills per text");
  hier->add_option("--R", h_R_one, "basic ratio");
  add_grid(hier, "R", h_R, "R");
  hier->add_option("--Rf", h_Rf_one, "domain ratio");
  add_grid(hier, "Rf", h_Rf, "R_f");
  hier->add_option("--prereq-mean", h_prereq_mean,
                   "Poisson mean of the prerequisite count");
  hier->add_option("--prereq-coeffs", h_prereq_coeffs,
                   "explicit delta_0,delta_1,... (overrides --prereq-mean)");
  add_learner_flags(hier, h_learner);
  add_output_flags(hier, h_out);
  add_config_flag(hier, config_path);

  // multiclass
  auto* multi =
      app.add_subcommand("multiclass", "multi-class density evolution");
  GridSpec m_R;
  double m_R_one = 1.0;
  std::string m_alpha = "1", m_beta = "0.5,0.5", m_cmat = "3;7";
  std::string m_mode = "near-far", m_beta_list = "0.1,0.3,0.5,0.7,0.9";
  double m_c1 = 3.0, m_c2 = 7.0;
  DESettings m_settings;
  OutputOptions m_out;
  multi->add_option("--R", m_R_one, "single R value");
  add_grid(multi, "R", m_R, "R");
  multi->add_option("--alpha", m_alpha, "text class fractions, comma list");
  multi->add_option("--beta", m_beta, "skill class fractions, comma list");
  multi->add_option("--c-matrix", m_cmat,
                    "c[k][j] rows ';'-separated, entries ','-separated");
  multi
      ->add_option("--mode", m_mode, "one-skill, near-far or coupled-near-far")
      ->check(CLI::IsMember({"one-skill", "near-far", "coupled-near-far"}));
  multi->add_option("--c1", m_c1, "class-1 text mean (coupled-near-far)");
  multi->add_option("--c2", m_c2, "class-2 text mean (coupled-near-far)");
  multi->add_option("--beta-list", m_beta_list,
                    "beta values for coupled-near-far");
  multi->add_option("--max-iter", m_settings.max_iter, "iteration budget");
  multi->add_option("--tol", m_settings.tol, "convergence tolerance");
  add_output_flags(multi, m_out);
  add_config_flag(multi, config_path);

  // compress
  auto* comp = app.add_subcommand("compress", "semantic compression costs");
  std::uint64_t cp_skills = 10000, cp_corpus = 0, cp_seed = 1;
  double cp_c = 3.0, cp_R = 2.0, cp_z = 236.4;
  LearnerOptions cp_learner;
  OutputOptions cp_out;
  comp->add_option("--skills", cp_skills, "|S|");
  comp->add_option("--c", cp_c, "mean skills per text");
  comp->add_option("--R", cp_R, "training ratio");
  comp->add_option("--z", cp_z, "lossless bits per text");
  comp->add_option("--corpus", cp_corpus,
                   "also encode this many fresh texts against a trained "
                   "catalog and report measured costs");
  comp->add_option("--seed", cp_seed, "root seed");
  add_learner_flags(comp, cp_learner);
  add_output_flags(comp, cp_out);
  add_config_flag(comp, config_path);

  // figure
  auto* fig = app.add_subcommand("figure", "regenerate a figure dataset");
  int fig_n = 5;
  int fig_trials = 100;
  std::uint64_t fig_seed = 1;
  OutputOptions fig_out;
  fig->add_option("n", fig_n, "figure number (5..10)")->required();
  fig->add_option("--trials", fig_trials, "simulation trials where relevant");
  fig->add_option("--seed", fig_seed, "root seed");
  add_output_flags(fig, fig_out);
  add_config_flag(fig, config_path);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config_args(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (de->parsed())
      return run_de(parse_list(de_cs), de_R, de_R_one, de_learner,
                    de_profile_csv, de_settings, de_out, threads);
    if (sim->parsed())
      return run_simulate(sim_c, sim_R, sim_R_one, sim_skills, sim_total,
                          sim_trials, sim_test_texts, sim_learner,
                          !sim_no_dedup, sim_seed, sim_out, threads);
    if (perc->parsed())
      return run_percolation(parse_list(perc_cs), perc_R, perc_R_one,
                             perc_learner, perc_mode, perc_total, perc_trials,
                             perc_seed, perc_out, threads);
    if (region->parsed())
      return run_region(rg_cmin, rg_cmax, rg_rmin, rg_rmax, rg_step,
                        rg_learner, rg_out, rg_thresholds, threads);
    if (hier->parsed())
      return run_hierarchy(h_c, h_R, h_R_one, h_cf, h_Rf, h_Rf_one,
                           h_prereq_mean, h_prereq_coeffs, h_learner, h_out,
                           threads);
    if (multi->parsed())
      return run_multiclass(m_R, m_R_one, m_alpha, m_beta, m_cmat, m_mode,
                            m_c1, m_c2, m_beta_list, m_settings, m_out);
    if (comp->parsed())
      return run_compress(cp_skills, cp_c, cp_R, cp_z, cp_learner, cp_corpus,
                          cp_seed, cp_out);
    if (fig->parsed())
      return run_figure(fig_n, fig_seed, fig_trials, threads, fig_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
