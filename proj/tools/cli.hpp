#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uforest/uforest.hpp"

// Command-line front end. `run` is kept separate from main() so the tests
// can drive it with captured streams.

namespace uforest::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// String-typed mirror of the forest flags; converted after parsing.
struct ForestFlags {
  std::size_t trees = 300;
  std::size_t min_leaf = 1;
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t mtry = 0;       // 0 = ceil(sqrt(d))
  std::string impurity = "gini";
  double kappa = 3.0;
  double frac_partition = 0.4;
  double frac_vote = 0.3;
  double frac_eval = 0.3;
  std::string eval_mode = "tree";
  std::string aggregation = "votes";
  bool honest = true;
  bool correction = true;
  std::size_t subsample = 0;  // 0 = all non-evaluation rows
  std::size_t knn_k = 3;
  unsigned threads = 0;

  ForestConfig config() const {
    ForestConfig c;
    c.n_trees = trees;
    c.tree_params.min_leaf_size = min_leaf;
    if (max_depth) c.tree_params.max_depth = max_depth;
    c.tree_params.n_candidate_features = mtry;
    c.tree_params.impurity = parse_impurity(impurity);
    c.kappa = kappa;
    c.frac_partition = frac_partition;
    c.frac_vote = frac_vote;
    c.frac_eval = frac_eval;
    c.eval_mode = parse_eval_mode(eval_mode);
    c.aggregation = parse_aggregation(aggregation);
    c.honest = honest;
    c.correction = correction;
    if (subsample) c.subsample_size = subsample;
    c.validate();
    return c;
  }

  EstimatorOptions estimator_options() const {
    EstimatorOptions o;
    o.forest = config();
    o.knn_k = knn_k;
    o.threads = threads;
    return o;
  }
};

inline void add_forest_flags(CLI::App* app, ForestFlags& f) {
  app->add_option("--trees", f.trees, "Number of trees B")->check(CLI::PositiveNumber)->group("Forest");
  app->add_option("--min-leaf", f.min_leaf, "Minimum partition rows per leaf k")->check(CLI::PositiveNumber)->group("Forest");
  app->add_option("--max-depth", f.max_depth, "Maximum tree depth, 0 = unbounded")->group("Forest");
  app->add_option("--mtry", f.mtry, "Candidate features per split, 0 = ceil(sqrt(d))")->group("Forest");
  app->add_option("--impurity", f.impurity, "Split criterion")->check(CLI::IsMember({"gini", "entropy"}))->group("Forest");
  app->add_option("--kappa", f.kappa, "Finite-sample correction constant")->check(CLI::PositiveNumber)->group("Forest");
  app->add_option("--frac-partition", f.frac_partition, "Partition-set fraction")->group("Forest");
  app->add_option("--frac-vote", f.frac_vote, "Voting-set fraction")->group("Forest");
  app->add_option("--frac-eval", f.frac_eval, "Evaluation-set fraction")->group("Forest");
  app->add_option("--eval-mode", f.eval_mode, "Evaluation set per tree or per forest")
      ->check(CLI::IsMember({"tree", "forest"}))
      ->group("Forest");
  app->add_option("--aggregation", f.aggregation, "Combination of tree posteriors")
      ->check(CLI::IsMember({"votes", "uniform", "per-tree"}))
      ->group("Forest");
  app->add_option("--honest", f.honest, "Separate partition and voting sets")->group("Forest");
  app->add_option("--correction", f.correction, "Finite-sample correction of leaf posteriors")->group("Forest");
  app->add_option("--subsample", f.subsample, "Rows per tree, 0 = all non-evaluation rows")->group("Forest");
  app->add_option("--knn-k", f.knn_k, "Neighbours for ksg / mixed-ksg")->check(CLI::PositiveNumber)->group("Forest");
  app->add_option("--threads", f.threads, "Worker threads, 0 = $UFOREST_THREADS or all cores")->group("Forest");
}

struct SimFlags {
  std::string setting = "spherical";
  double mu = 1.0;
  double pi = 0.5;
  std::size_t d = 1;
  std::size_t n = 6000;

  sim::SimSetting to_setting() const {
    sim::SimSetting s{sim::parse_setting_kind(setting), mu, pi, d};
    s.validate();
    return s;
  }
};

inline void add_sim_flags(CLI::App* app, SimFlags& s, bool with_n = true) {
  app->add_option("--setting", s.setting, "Simulation setting")
      ->check(CLI::IsMember({"spherical", "elliptical", "three-class"}))
      ->group("Simulation");
  app->add_option("--mu", s.mu, "Effect size mu")->group("Simulation");
  app->add_option("--pi", s.pi, "Class prior pi")->group("Simulation");
  app->add_option("--d", s.d, "Total dimension")->check(CLI::PositiveNumber)->group("Simulation");
  if (with_n) app->add_option("--n", s.n, "Sample size")->check(CLI::PositiveNumber)->group("Simulation");
}

struct DataFlags {
  std::string in;
  std::string label = "y";
  SimFlags sim;
};

inline void add_data_flags(CLI::App* app, DataFlags& f, const std::string& default_label = "y") {
  f.label = default_label;
  app->add_option("--in", f.in, "Dataset CSV; when absent the data are simulated")->group("Data");
  app->add_option("--label", f.label, "Label column of --in")->group("Data");
  add_sim_flags(app, f.sim);
}

inline LabeledDataset load_data(const DataFlags& f, std::uint64_t seed) {
  if (!f.in.empty()) {
    auto data = io::load_csv(f.in, f.label);
    if (!data.labeled()) throw DataError(f.in + ": no label column '" + f.label + "'");
    return data;
  }
  return sim::sample(f.sim.to_setting(), f.sim.n, seed);
}

inline void print_record(std::ostream& out, const EstimateReport& report) {
  for (const auto& [k, v] : report.to_record()) out << k << " = " << v << '\n';
}

inline std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    const auto a = cur.find_first_not_of(" \t"), b = cur.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

inline std::string join(const std::vector<std::string>& names, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? sep : "") + names[i];
  return s;
}

inline std::string g(double v) { return format_g17(v); }

// Row mean of values[i] over `count` trials starting at `first`, stepping by `stride`.
inline double mean_of(const std::vector<io::SweepRow>& rows, std::size_t first, std::size_t count, std::size_t stride,
                      double io::SweepRow::*field) {
  double s = 0.0;
  for (std::size_t t = 0; t < count; ++t) s += rows[first + t * stride].*field;
  return s / static_cast<double>(count);
}

/// Summary table of a sweep: one line per grid point with the truth and the
/// mean of `field` per estimator.
inline std::string summarize(const experiments::SweepSpec& spec, const std::vector<io::SweepRow>& rows, const std::string& panel,
                             double io::SweepRow::*field, bool normalized, std::vector<svg::Series>* curves = nullptr,
                             bool x_is_n = false, bool x_is_pi = false, bool x_is_d = false) {
  const auto points = experiments::grid_points(spec);
  const std::size_t ne = spec.estimators.size();
  std::string out;
  if (curves) {
    curves->assign(ne + 1, {});
    (*curves)[0].name = "truth";
    for (std::size_t e = 0; e < ne; ++e) (*curves)[e + 1] = {spec.estimators[e], {}, {}, true};
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& pt = points[p];
    const auto tv = sim::truth({spec.kind, pt.mu, pt.pi, pt.d});
    const double truth = normalized ? tv.mi_normalized : tv.h_y_given_x;
    out += panel + ',' + sim::to_string(spec.kind) + ',' + std::to_string(pt.n) + ',' + std::to_string(pt.d) + ',' + g(pt.mu) +
           ',' + g(pt.pi) + ',' + g(truth);
    const double x = x_is_n ? static_cast<double>(pt.n) : x_is_pi ? pt.pi : x_is_d ? static_cast<double>(pt.d) : pt.mu;
    if (curves) {
      (*curves)[0].x.push_back(x);
      (*curves)[0].y.push_back(truth);
    }
    for (std::size_t e = 0; e < ne; ++e) {
      const double m = mean_of(rows, p * spec.trials * ne + e, spec.trials, ne, field);
      out += ',' + g(m);
      if (curves) {
        (*curves)[e + 1].x.push_back(x);
        (*curves)[e + 1].y.push_back(m);
      }
    }
    out += '\n';
  }
  return out;
}

inline std::string summary_header(const std::vector<std::string>& estimators) {
  std::string h = "panel,setting,n,d,mu,pi,truth";
  for (const auto& e : estimators) h += ',' + e;
  return h + '\n';
}

struct ReproduceFlags {
  std::string figure;
  std::string out_dir = "results";
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  bool svg = false;
  std::string in;
  std::string label = "type";
  std::size_t reps = 1000;
};

inline void reproduce_fig1(const ReproduceFlags& r, const ForestFlags& ff, std::ostream& out) {
  const auto config = ff.config();
  const std::vector<std::string> flavours{"cart", "irf", "honest", "uf"};
  const auto set = experiments::posterior_profiles({sim::SettingKind::Spherical, 1.0, 0.5, 1}, 6000, r.trials, flavours,
                                                   config, r.seed, experiments::linspace(-3.0, 3.0, 61), ff.threads);
  std::string curves = "estimator,trial,x,p_pos\n";
  for (std::size_t e = 0; e < flavours.size(); ++e)
    for (std::size_t t = 0; t < r.trials; ++t)
      for (std::size_t i = 0; i < set.xs.size(); ++i)
        curves += flavours[e] + ',' + std::to_string(t) + ',' + g(set.xs[i]) + ',' + g(set.values[e][t][i]) + '\n';
  io::write_text(fs::path(r.out_dir) / "fig1_posteriors.csv", curves);

  std::string summary = "x,truth";
  for (const auto& f : flavours) summary += ',' + f + "_mean," + f + "_var";
  summary += '\n';
  std::vector<std::vector<double>> means, vars;
  for (std::size_t e = 0; e < flavours.size(); ++e) {
    means.push_back(set.mean(e));
    vars.push_back(set.variance(e));
  }
  std::vector<double> truth;
  for (double x : set.xs) truth.push_back(sim::posterior({sim::SettingKind::Spherical, 1.0, 0.5, 1}, std::span(&x, 1))[1]);
  for (std::size_t i = 0; i < set.xs.size(); ++i) {
    summary += g(set.xs[i]) + ',' + g(truth[i]);
    for (std::size_t e = 0; e < flavours.size(); ++e) summary += ',' + g(means[e][i]) + ',' + g(vars[e][i]);
    summary += '\n';
  }
  io::write_text(fs::path(r.out_dir) / "fig1_variance.csv", summary);
  out << "wrote " << (fs::path(r.out_dir) / "fig1_posteriors.csv").string() << ", "
      << (fs::path(r.out_dir) / "fig1_variance.csv").string() << '\n';
  if (r.svg) {
    svg::LinePlot mean_plot{"Posterior mean, mu = 1, n = 6000", "x", "p(y = +1 | x)", {{"truth", set.xs, truth}}};
    svg::LinePlot var_plot{"Posterior variance over trials", "x", "variance", {}};
    for (std::size_t e = 0; e < flavours.size(); ++e) {
      mean_plot.series.push_back({flavours[e], set.xs, means[e]});
      var_plot.series.push_back({flavours[e], set.xs, vars[e]});
    }
    io::write_text(fs::path(r.out_dir) / "fig1_mean.svg", mean_plot.render());
    io::write_text(fs::path(r.out_dir) / "fig1_variance.svg", var_plot.render());
  }
}

inline void reproduce_fig2(const ReproduceFlags& r, const ForestFlags& ff, std::ostream& out) {
  std::vector<io::SweepRow> all;
  std::string summary = summary_header({"uf", "cart", "irf"});
  struct Panel {
    const char* name;
    std::size_t d;
    std::vector<std::size_t> n;
    std::vector<double> mu;
  };
  const std::vector<Panel> panels{{"A", 1, {500, 1000, 2000, 4000, 6000}, {1.0}},
                                  {"B", 1, {3000}, {0.0, 0.5, 1.0, 2.0, 4.0}},
                                  {"C", 20, {500, 1000, 2000, 4000, 6000}, {1.0}},
                                  {"D", 20, {6000}, {0.0, 0.5, 1.0, 2.0, 4.0}}};
  for (const auto& p : panels) {
    experiments::SweepSpec spec;
    spec.n_grid = p.n;
    spec.d_grid = {p.d};
    spec.mu_grid = p.mu;
    spec.trials = r.trials;
    spec.estimators = {"uf", "cart", "irf"};
    spec.seed = derive_seed(r.seed, static_cast<std::uint64_t>(p.name[0]));
    spec.options = ff.estimator_options();
    const auto rows = experiments::run_sweep(spec);
    all.insert(all.end(), rows.begin(), rows.end());
    std::vector<svg::Series> curves;
    const bool by_n = p.n.size() > 1;
    summary += summarize(spec, rows, p.name, &io::SweepRow::h_y_given_x, false, &curves, by_n);
    if (r.svg) {
      svg::LinePlot plot{std::string("Panel ") + p.name + ", d = " + std::to_string(p.d), by_n ? "n" : "mu",
                         "H(Y|X) estimate (nats)", curves, by_n};
      io::write_text(fs::path(r.out_dir) / (std::string("fig2_") + p.name + ".svg"), plot.render());
    }
  }
  io::save_report(all, fs::path(r.out_dir) / "fig2_rows.csv");
  io::write_text(fs::path(r.out_dir) / "fig2_summary.csv", summary);
  out << "wrote " << (fs::path(r.out_dir) / "fig2_rows.csv").string() << ", "
      << (fs::path(r.out_dir) / "fig2_summary.csv").string() << '\n';
}

inline void reproduce_fig3(const ReproduceFlags& r, const ForestFlags& ff, std::ostream& out) {
  const std::vector<std::string> estimators{"uf", "ksg", "mixed-ksg", "irf"};
  std::vector<io::SweepRow> all;
  std::string summary = summary_header(estimators);
  for (auto kind : {sim::SettingKind::Spherical, sim::SettingKind::Elliptical, sim::SettingKind::ThreeClass}) {
    for (const bool by_prior : {true, false}) {
      experiments::SweepSpec spec;
      spec.kind = kind;
      spec.n_grid = {6000};
      spec.mu_grid = {1.0};
      if (by_prior) {
        spec.d_grid = {2};
        spec.pi_grid = {0.1, 0.2, 0.3, 0.4, 0.5};
      } else {
        spec.d_grid = {2, 4, 8, 12, 16, 20};
        spec.pi_grid = {kind == sim::SettingKind::ThreeClass ? 1.0 / 3.0 : 0.5};
      }
      spec.trials = r.trials;
      spec.estimators = estimators;
      spec.seed = derive_seed(r.seed, static_cast<std::uint64_t>(kind), by_prior ? 1 : 2);
      spec.options = ff.estimator_options();
      const auto rows = experiments::run_sweep(spec);
      all.insert(all.end(), rows.begin(), rows.end());
      const std::string panel = by_prior ? "prior" : "dimension";
      std::vector<svg::Series> curves;
      summary += summarize(spec, rows, panel, &io::SweepRow::mi_normalized, true, &curves, false, by_prior, !by_prior);
      if (r.svg) {
        svg::LinePlot plot{sim::to_string(kind) + (by_prior ? ", d = 2" : ", varying d"), by_prior ? "pi" : "d",
                           "normalized MI", curves};
        io::write_text(fs::path(r.out_dir) / ("fig3_" + sim::to_string(kind) + "_" + panel + ".svg"), plot.render());
      }
    }
  }
  io::save_report(all, fs::path(r.out_dir) / "fig3_rows.csv");
  io::write_text(fs::path(r.out_dir) / "fig3_summary.csv", summary);
  out << "wrote " << (fs::path(r.out_dir) / "fig3_rows.csv").string() << ", "
      << (fs::path(r.out_dir) / "fig3_summary.csv").string() << '\n';
}

/// Feature subsets of the connectome table.
inline std::vector<std::vector<std::string>> connectome_subsets() {
  return {{"claw"},         {"dist"},          {"age"},         {"cluster"},
          {"cluster", "claw"}, {"cluster", "dist"}, {"cluster", "age"}, {"cluster", "claw", "dist"},
          {"cluster", "claw", "age"}, {"cluster", "dist", "age"}};
}

inline std::string decomposition_csv(const std::vector<DecompositionRow>& rows) {
  std::string s = "x_in,i_in,i_cond,i_total,i_in_normalized,i_cond_normalized,i_total_normalized\n";
  for (const auto& row : rows) {
    auto norm = [&](double v) { return row.h_y > 0.0 ? v / row.h_y : 0.0; };
    s += io::detail::quote_if_needed(join(row.in_features, " ")) + ',' + g(row.i_in) + ',' + g(row.i_cond) + ',' +
         g(row.i_total) + ',' + g(norm(row.i_in)) + ',' + g(norm(row.i_cond)) + ',' + g(norm(row.i_total)) + '\n';
  }
  return s;
}

inline std::string permtest_csv(const PermutationTestResult& res) {
  std::string s = "replicate,mi\n";
  s += "observed," + g(res.observed) + '\n';
  for (std::size_t i = 0; i < res.null_values.size(); ++i) s += std::to_string(i) + ',' + g(res.null_values[i]) + '\n';
  return s;
}

inline void reproduce_fig4(const ReproduceFlags& r, const ForestFlags& ff, std::ostream& out) {
  if (r.in.empty()) throw ConfigError("fig4 needs --in <connectome feature CSV> (columns claw, dist, age, cluster, type)");
  const auto data = io::load_csv(r.in, r.label);
  if (!data.labeled()) throw DataError(r.in + ": no label column '" + r.label + "'");
  const auto config = ff.config();
  const auto rows = mi_decomposition(data, connectome_subsets(), config, r.seed, ff.threads);
  io::write_text(fs::path(r.out_dir) / "fig4_table.csv", decomposition_csv(rows));
  const auto res = permutation_test(data, config, r.reps, r.seed, ff.threads);
  io::write_text(fs::path(r.out_dir) / "fig4_permutation.csv", permtest_csv(res));
  out << "observed_mi = " << g(res.observed) << "\np_value = " << g(res.p_value) << '\n';
  out << "wrote " << (fs::path(r.out_dir) / "fig4_table.csv").string() << ", "
      << (fs::path(r.out_dir) / "fig4_permutation.csv").string() << '\n';
}

/// Splices `--config FILE` (a flat "key = value" file, '#' comments) into
/// the arguments of the chosen command. Keys are long option names without
/// the dashes; flags given explicitly on the command line win. Unknown keys
/// throw ConfigError.
inline std::vector<std::string> expand_config(CLI::App& app, int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  const auto at = std::ranges::find(args, std::string("--config"));
  if (at == args.end()) return args;
  if (at + 1 == args.end()) throw ConfigError("--config needs a file name");
  const std::string file = *(at + 1);
  args.erase(at, at + 2);
  if (args.size() < 2) throw ConfigError("--config must follow a command");
  CLI::App* cmd = app.get_subcommand_no_throw(args[1]);
  if (!cmd) throw ConfigError("--config must follow a command");

  auto given = [&](const std::string& key) {
    return std::ranges::any_of(args, [&](const std::string& a) { return a == "--" + key || a.starts_with("--" + key + "="); });
  };
  std::vector<std::string> extra;
  std::istringstream in(io::read_text(file));
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(file + ":" + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string v) {
      const auto a = v.find_first_not_of(" \t\r"), b = v.find_last_not_of(" \t\r");
      v = a == std::string::npos ? "" : v.substr(a, b - a + 1);
      if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
      return v;
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt || key == "help") throw ConfigError(file + ":" + std::to_string(line_no) + ": unknown key '" + key + "' for " + args[1]);
    if (given(key)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1") extra.push_back("--" + key);
      continue;
    }
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

/// Parses argv and runs one command. Returns 0 on success, 1 on usage
/// errors, 2 on data errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Uncertainty forest estimates of conditional entropy and mutual information", "uforest"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string("uforest 1.0"));

  ForestFlags ff;
  std::uint64_t seed = 0;
  std::string out_path;

  // simulate
  SimFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Draw a dataset from a simulation setting and write it as CSV");
  add_sim_flags(simulate, sf);
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--out", out_path, "Output CSV")->required();

  // estimate
  DataFlags est_data;
  std::string estimator = "uf";
  std::string save_forest;
  auto* estimate = app.add_subcommand("estimate", "Estimate H(Y|X) and I(X;Y) with one estimator");
  add_data_flags(estimate, est_data);
  estimate->add_option("--estimator", estimator, "Estimator")->check(CLI::IsMember(estimator_names()));
  estimate->add_option("--seed", seed, "Random seed");
  estimate->add_option("--out", out_path, "Optional report CSV");
  estimate->add_option("--save-forest", save_forest, "Optional JSON file for the fitted forest (uf, cart)");
  add_forest_flags(estimate, ff);

  // sweep
  std::string sweep_setting = "spherical";
  std::vector<std::string> sweep_estimators{"uf"};
  std::vector<std::size_t> n_grid{6000}, d_grid{1};
  std::vector<double> mu_grid{1.0}, pi_grid{0.5};
  std::size_t trials = 1;
  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "Run estimators over grids of n, d, mu, pi with repeated trials");
  sweep->add_option("--setting", sweep_setting, "Simulation setting")
      ->check(CLI::IsMember({"spherical", "elliptical", "three-class"}));
  sweep->add_option("--estimators", sweep_estimators, "Comma-separated estimators")
      ->delimiter(',')
      ->check(CLI::IsMember(estimator_names()));
  sweep->add_option("--n-grid", n_grid, "Comma-separated sample sizes")->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--d-grid", d_grid, "Comma-separated dimensions")->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--mu-grid", mu_grid, "Comma-separated effect sizes")->delimiter(',');
  sweep->add_option("--pi-grid", pi_grid, "Comma-separated class priors")->delimiter(',');
  sweep->add_option("--trials", trials, "Trials per grid point")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Random seed");
  sweep->add_option("--out", out_path, "Output report CSV")->required();
  sweep->add_flag("--timing", timing, "Record wall time per estimate (makes output machine-dependent)");
  add_forest_flags(sweep, ff);

  // permtest
  DataFlags perm_data;
  std::size_t reps = 1000;
  auto* permtest = app.add_subcommand("permtest", "Permutation test of I(X;Y) > 0");
  add_data_flags(permtest, perm_data);
  permtest->add_option("--estimator", estimator, "Estimator used as the statistic")->check(CLI::IsMember(estimator_names()));
  permtest->add_option("--reps", reps, "Permutation replicates R")->check(CLI::PositiveNumber);
  permtest->add_option("--seed", seed, "Random seed");
  permtest->add_option("--out", out_path, "Optional CSV of observed and null values");
  add_forest_flags(permtest, ff);

  // decompose
  DataFlags dec_data;
  std::vector<std::string> subsets;
  auto* decompose = app.add_subcommand("decompose", "Split I(Y;X) into I(Y;X_in) + I(Y;X_out | X_in) over feature subsets");
  add_data_flags(decompose, dec_data);
  decompose->add_option("--subset", subsets,
                        "Comma-separated in-features; repeat per row; '-' is the empty set (default: each feature alone)");
  decompose->add_option("--seed", seed, "Random seed");
  decompose->add_option("--out", out_path, "Optional table CSV");
  add_forest_flags(decompose, ff);

  // reproduce
  ReproduceFlags rf;
  auto* reproduce = app.add_subcommand("reproduce", "Desk-scale figure presets: fig1, fig2, fig3 (simulated), fig4 (needs --in)");
  reproduce->add_option("figure", rf.figure, "Figure id")->required()->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  reproduce->add_option("--out-dir", rf.out_dir, "Directory for the emitted files");
  reproduce->add_option("--trials", rf.trials, "Trials per grid point")->check(CLI::PositiveNumber);
  reproduce->add_option("--seed", rf.seed, "Random seed");
  reproduce->add_flag("--svg", rf.svg, "Also write SVG line plots");
  reproduce->add_option("--in", rf.in, "fig4: connectome feature CSV");
  reproduce->add_option("--label", rf.label, "fig4: label column");
  reproduce->add_option("--reps", rf.reps, "fig4: permutation replicates")->check(CLI::PositiveNumber);
  add_forest_flags(reproduce, ff);

  std::vector<std::string> args;
  try {
    args = expand_config(app, argc, argv);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<const char*> ptrs;
  for (const auto& a : args) ptrs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    // Resolved configuration, defaults included, as comment lines.
    {
      std::istringstream echo(cmd->config_to_str(true, false));
      for (std::string line; std::getline(echo, line);)
        if (!line.empty()) out << "# " << line << '\n';
    }

    if (cmd == simulate) {
      const auto data = sim::sample(sf.to_setting(), sf.n, seed);
      io::save_csv(data, out_path);
      out << "wrote " << out_path << " (" << data.size() << " rows)\n";
    } else if (cmd == estimate) {
      const auto opts = ff.estimator_options();
      const auto data = load_data(est_data, seed);
      const auto report = run_estimator(estimator, data, opts, seed);
      print_record(out, report);
      if (!out_path.empty()) {
        const bool simulated = est_data.in.empty();
        io::save_report({io::SweepRow::from_report(report, simulated ? est_data.sim.mu : std::nan(""),
                                                   simulated ? est_data.sim.pi : std::nan(""))},
                        out_path);
      }
      if (!save_forest.empty()) {
        if (estimator != "uf" && estimator != "cart") throw ConfigError("--save-forest works with uf and cart only");
        ForestConfig c = estimator == "uf" ? opts.forest : ForestConfig::cart();
        if (estimator == "cart") {
          c.n_trees = opts.forest.n_trees;
          c.tree_params = opts.forest.tree_params;
        }
        io::write_text(save_forest, forest_to_json(fit_forest(data, c, seed, opts.threads)).dump() + "\n");
      }
    } else if (cmd == sweep) {
      experiments::SweepSpec spec;
      spec.kind = sim::parse_setting_kind(sweep_setting);
      spec.n_grid = n_grid;
      spec.d_grid = d_grid;
      spec.mu_grid = mu_grid;
      spec.pi_grid = pi_grid;
      spec.trials = trials;
      spec.estimators = sweep_estimators;
      spec.seed = seed;
      spec.options = ff.estimator_options();
      spec.timing = timing;
      const auto rows = experiments::run_sweep(spec);
      io::save_report(rows, out_path);
      out << "wrote " << out_path << " (" << rows.size() << " rows)\n";
    } else if (cmd == permtest) {
      const auto opts = ff.estimator_options();
      const auto data = load_data(perm_data, seed);
      EstimatorOptions inner = opts;
      inner.threads = 1;
      const MiStatistic stat = [&](const LabeledDataset& d, std::uint64_t s) { return run_estimator(estimator, d, inner, s).mi; };
      const auto res = permutation_test(data, stat, reps, seed, opts.threads);
      out << "observed_mi = " << g(res.observed) << "\nreps = " << reps << "\np_value = " << g(res.p_value) << '\n';
      if (!out_path.empty()) io::write_text(out_path, permtest_csv(res));
    } else if (cmd == decompose) {
      const auto config = ff.config();
      const auto data = load_data(dec_data, seed);
      std::vector<std::vector<std::string>> sets;
      for (const auto& s : subsets) sets.push_back(s == "-" ? std::vector<std::string>{} : split_names(s));
      if (sets.empty())
        for (const auto& name : data.feature_names) sets.push_back({name});
      const auto rows = mi_decomposition(data, sets, config, seed, ff.threads);
      const std::string table = decomposition_csv(rows);
      out << table;
      if (!out_path.empty()) io::write_text(out_path, table);
    } else if (cmd == reproduce) {
      if (rf.figure == "fig1") reproduce_fig1(rf, ff, out);
      else if (rf.figure == "fig2") reproduce_fig2(rf, ff, out);
      else if (rf.figure == "fig3") reproduce_fig3(rf, ff, out);
      else reproduce_fig4(rf, ff, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace uforest::cli
