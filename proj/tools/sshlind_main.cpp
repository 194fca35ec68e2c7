// Command-line front end: spectra, dynamics, gap scans, dark-state reports,
// and brute-force validation for the boundary-dissipated SSH chain.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sshlind/analytic.hpp"
#include "sshlind/dynamics.hpp"
#include "sshlind/fitting.hpp"
#include "sshlind/io.hpp"
#include "sshlind/matching.hpp"
#include "sshlind/model.hpp"
#include "sshlind/oracle.hpp"
#include "sshlind/thirdq.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "tsv";
  int threads = 1;
  double tol = 1e-6;
};

std::string out_path(const GlobalOpts& g, const std::string& stem) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / (stem + "." + g.format)).string();
}

sshlind::OpenChainModel load_model(const GlobalOpts& g) {
  return sshlind::model_from_config(sshlind::KeyValueConfig::parse_file(g.config_path));
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                 : comma - pos);
    if (!tok.empty()) {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size())
        throw sshlind::ConfigError(std::string(what) + ": bad number '" + tok + "'");
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty())
    throw sshlind::ConfigError(std::string(what) + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  for (double v : parse_double_list(csv, what)) {
    int n = static_cast<int>(v);
    if (n != v) throw sshlind::ConfigError(std::string(what) + ": expected integers");
    out.push_back(n);
  }
  return out;
}

int cmd_rapidity(const GlobalOpts& g) {
  using namespace sshlind;
  OpenChainModel model = load_model(g);
  RapiditySpectrum rs = rapidity_spectrum(model);
  BoundStateCriteria crit = BoundStateCriteria::defaults(model.n_cells);

  Table t;
  t.columns = {"re_e", "im_e", "bound"};
  int bound_rows = 0;
  for (const auto& e : rs.distinct)
    for (int copy = 0; copy < 2; ++copy) {
      t.add_row({fmt_double(e.value.real()), fmt_double(e.value.imag()),
                 e.bound ? "1" : "0"});
      bound_rows += e.bound ? 1 : 0;
    }
  int bound_modes = static_cast<int>(rs.bound_entries().size());

  RunManifest m;
  m.command = "rapidity";
  m.add_model(model)
      .add("rows", static_cast<int>(t.rows.size()))
      .add("bound_rows", bound_rows)
      .add("bound_modes", bound_modes)
      .add("ipr_threshold", crit.ipr_threshold)
      .add("boundary_weight_threshold", crit.boundary_weight_threshold)
      .add("boundary_sites", crit.boundary_sites);
  std::string path = out_path(g, "rapidity");
  write_table_file(path, g.format, m, t);
  std::printf("rapidity: wrote %s (%zu rows, %d bound modes)\n", path.c_str(),
              t.rows.size(), bound_modes);
  return 0;
}

int cmd_spectrum(const GlobalOpts& g, long long max_terms) {
  using namespace sshlind;
  OpenChainModel model = load_model(g);
  EnumerationOptions opt;
  opt.max_terms = max_terms;
  LiouvillianSpectrum ls = liouvillian_spectrum(rapidity_spectrum(model), opt);
  double gap = gap_from_spectrum(ls);

  Table t;
  t.columns = {"re_lambda", "im_lambda", "multiplicity", "stripe"};
  for (const auto& e : ls.entries)
    t.add_row({fmt_double(e.value.real()), fmt_double(e.value.imag()),
               std::to_string(e.multiplicity), std::to_string(e.stripe_index)});

  std::vector<Stripe> stripes = stripe_decompose(ls);
  Table st;
  st.columns = {"stripe", "count", "min_re", "max_re"};
  for (const auto& s : stripes)
    st.add_row({std::to_string(s.index), std::to_string(s.count),
                fmt_double(s.min_re), fmt_double(s.max_re)});

  RunManifest m;
  m.command = "spectrum";
  m.add_model(model)
      .add("entries", static_cast<int>(ls.entries.size()))
      .add("total_multiplicity", std::to_string(ls.total_multiplicity))
      .add("truncated", ls.truncated ? 1 : 0)
      .add("gap", gap)
      .add("stripes", static_cast<int>(stripes.size()));
  std::string path = out_path(g, "spectrum");
  write_table_file(path, g.format, m, t);
  std::string spath = out_path(g, "spectrum_stripes");
  write_table_file(spath, g.format, m, st);
  std::printf("spectrum: wrote %s and %s (%zu values, %zu stripes, gap %s)\n",
              path.c_str(), spath.c_str(), ls.entries.size(), stripes.size(),
              fmt_double(gap).c_str());
  return 0;
}

int cmd_dynamics(const GlobalOpts& g, double t_min, double t_max, int points,
                 const std::string& grid, bool profile, bool dual) {
  using namespace sshlind;
  OpenChainModel model = load_model(g);
  std::vector<double> times = grid == "log" ? log_time_grid(t_min, t_max, points)
                                            : linear_time_grid(t_min, t_max, points);
  CorrelationMatrix g0 = initial_fully_occupied(model.n_cells);
  DensityTrajectory traj = density_trajectory(g0, model, times);
  SteadyStateResult ss = steady_state(model);

  std::optional<DualityReport> dr;
  if (dual) dr = duality_report(model, times);

  Table t;
  t.columns = {"t", "n"};
  if (dual) {
    t.columns.push_back("n_dual");
    t.columns.push_back("abs_diff");
  }
  if (profile)
    for (int s = 1; s <= model.sites(); ++s)
      t.columns.push_back("n_" + std::to_string(s));
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<std::string> row{fmt_double(times[k]), fmt_double(traj.density[k])};
    if (dual) {
      row.push_back(fmt_double(dr->density_reciprocal[k]));
      row.push_back(fmt_double(dr->abs_diff[k]));
    }
    if (profile)
      for (int s = 0; s < model.sites(); ++s)
        row.push_back(fmt_double(traj.profiles(static_cast<Eigen::Index>(k), s)));
    t.add_row(std::move(row));
  }

  RunManifest m;
  m.command = "dynamics";
  m.add_model(model)
      .add("t_min", t_min)
      .add("t_max", t_max)
      .add("points", points)
      .add("grid", grid)
      .add("steady_density", density(ss.state))
      .add("steady_residual", ss.residual)
      .add("steady_ill_conditioned", ss.ill_conditioned ? 1 : 0)
      .add("steady_dense_fallback", ss.used_dense_fallback ? 1 : 0);
  if (dual) m.add("late_time_max_diff", dr->late_time_max_diff);
  std::string path = out_path(g, "dynamics");
  write_table_file(path, g.format, m, t);
  std::printf("dynamics: wrote %s (%zu times%s)\n", path.c_str(), times.size(),
              dual ? ", dual run included" : "");
  return 0;
}

int cmd_gap_scan(const GlobalOpts& g, int n_min, int n_max, int n_step,
                 const std::string& n_list_csv, const std::string& t1_list_csv) {
  using namespace sshlind;
  OpenChainModel model = load_model(g);

  if (!t1_list_csv.empty()) {
    std::vector<double> t1s = parse_double_list(t1_list_csv, "--t1-list");
    Table t;
    t.columns = {"t1", "gap"};
    for (double v : t1s) {
      OpenChainModel m2 = model;
      m2.t1 = v;
      t.add_row({fmt_double(v), fmt_double(liouvillian_gap(m2))});
    }
    RunManifest m;
    m.command = "gap-scan";
    m.add_model(model).add("mode", "t1").add("points", static_cast<int>(t1s.size()));
    std::string path = out_path(g, "gap_scan");
    write_table_file(path, g.format, m, t);
    std::printf("gap-scan: wrote %s (%zu t1 points at n_cells=%d)\n", path.c_str(),
                t1s.size(), model.n_cells);
    return 0;
  }

  std::vector<int> ns;
  if (!n_list_csv.empty()) {
    ns = parse_int_list(n_list_csv, "--n-list");
  } else if (n_min > 0 && n_max >= n_min) {
    for (int n = n_min; n <= n_max; n += n_step) ns.push_back(n);
  } else {
    throw ConfigError("gap-scan: give --n-list or --n-min/--n-max");
  }

  GapScanOptions opt;
  opt.threads = g.threads;
  ScalingSeries series = gap_scan(model, ns, opt);

  Table t;
  t.columns = {"n_cells", "gap", "usable"};
  for (const auto& p : series.points)
    t.add_row({std::to_string(p.n_cells), fmt_double(p.gap), "1"});
  for (const auto& p : series.excluded)
    t.add_row({std::to_string(p.n_cells), fmt_double(p.gap), "0"});
  std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
    return std::stoi(a[0]) < std::stoi(b[0]);
  });

  RunManifest m;
  m.command = "gap-scan";
  m.add_model(model)
      .add("mode", "size")
      .add("points_usable", static_cast<int>(series.points.size()))
      .add("points_excluded", static_cast<int>(series.excluded.size()));
  if (series.points.size() >= 4) {
    ModelSelection sel = select_scaling_model(series);
    m.add("fit_exp_amplitude", sel.exponential.amplitude)
        .add("fit_exp_rate", sel.exponential.rate)
        .add("fit_exp_r2", sel.exponential.r_squared)
        .add("fit_pow_amplitude", sel.powerlaw.amplitude)
        .add("fit_pow_exponent", sel.powerlaw.rate)
        .add("fit_pow_r2", sel.powerlaw.r_squared)
        .add("fit_preferred", sel.preferred)
        .add("fit_degenerate", sel.degenerate ? 1 : 0);
  } else {
    m.add("fit_preferred", "none")
        .add("fit_note", "fewer than 4 usable points, fits skipped");
  }
  std::string path = out_path(g, "gap_scan");
  write_table_file(path, g.format, m, t);
  std::printf("gap-scan: wrote %s (%zu usable, %zu below floor)\n", path.c_str(),
              series.points.size(), series.excluded.size());
  return 0;
}

int cmd_dark_state(const GlobalOpts& g) {
  using namespace sshlind;
  OpenChainModel model = load_model(g);
  int active = 0;
  for (const auto& d : model.dissipators) active += d.strength > 0.0 ? 1 : 0;
  if (active != 1)
    throw ConfigError(
        "dark-state: exactly one boundary dissipator with positive strength "
        "is required");

  RapiditySpectrum rs = rapidity_spectrum(model);
  const RapidityEntry* min_e = &rs.distinct.front();
  for (const auto& e : rs.distinct)
    if (std::abs(e.value) < std::abs(min_e->value)) min_e = &e;

  const int ncells = model.n_cells;
  std::vector<double> amp(ncells, 0.0);
  for (int j = 0; j < ncells; ++j)
    amp[j] = std::sqrt(std::norm(min_e->vector(2 * j)) +
                       std::norm(min_e->vector(2 * j + 1)));
  Table t;
  t.columns = {"cell", "amplitude", "ratio_to_prev"};
  std::vector<double> ratios;
  for (int j = 0; j < ncells; ++j) {
    std::string ratio = "";
    if (j > 0 && amp[j - 1] > 1e-300) {
      ratio = fmt_double(amp[j] / amp[j - 1]);
      if (amp[j] > 1e-10 && amp[j - 1] > 1e-10) ratios.push_back(amp[j] / amp[j - 1]);
    }
    t.add_row({std::to_string(j + 1), fmt_double(amp[j]), ratio});
  }
  double median_ratio = 0.0;
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    median_ratio = ratios[ratios.size() / 2];
  }

  RunManifest m;
  m.command = "dark-state";
  m.add_model(model);
  try {
    BoundStatePrediction pred = dark_state_prediction(model);
    m.add("analytic_exists", pred.exists ? 1 : 0);
    if (pred.exists) {
      m.add("analytic_x", pred.x)
          .add("analytic_cell_decay_ratio", pred.cell_decay_ratio)
          .add("analytic_localized_side", to_string(pred.localized_side))
          .add("analytic_marginal", pred.marginal ? 1 : 0);
    }
  } catch (const std::exception& e) {
    m.add("analytic_exists", 0).add("analytic_note", e.what());
  }
  m.add("numeric_min_abs_e", std::abs(min_e->value))
      .add("numeric_min_e_re", min_e->value.real())
      .add("numeric_min_e_im", min_e->value.imag())
      .add("numeric_median_cell_ratio", median_ratio)
      .add("numeric_bound_flag", min_e->bound ? 1 : 0);
  std::string path = out_path(g, "dark_state");
  write_table_file(path, g.format, m, t);
  std::printf("dark-state: wrote %s (min |E| = %s, median cell ratio %s)\n",
              path.c_str(), fmt_double(std::abs(min_e->value)).c_str(),
              fmt_double(median_ratio).c_str());
  return 0;
}

int cmd_validate(const GlobalOpts& g) {
  using namespace sshlind;
  OpenChainModel model = load_model(g);
  if (model.n_cells > oracle::kMaxCells)
    throw ConfigError("validate: n_cells must be <= " +
                      std::to_string(oracle::kMaxCells) +
                      " for the brute-force cross-check");

  Table t;
  t.columns = {"check", "value", "tol", "pass"};
  bool all_pass = true;
  auto record = [&](const std::string& name, double value, double tol) {
    bool pass = value < tol;
    all_pass = all_pass && pass;
    t.add_row({name, fmt_double(value), fmt_double(tol), pass ? "1" : "0"});
  };

  LiouvillianSpectrum ls = liouvillian_spectrum(rapidity_spectrum(model));
  std::vector<std::complex<double>> assembled = ls.expanded_values();
  Eigen::VectorXcd ed = oracle::ed_spectrum(model);
  std::vector<std::complex<double>> ed_values(ed.data(), ed.data() + ed.size());
  record("liouvillian_spectrum_pairing_distance",
         greedy_match_max_distance(assembled, ed_values), g.tol);

  bool dissipated = model.gamma(BoundarySide::left) > 0.0 ||
                    model.gamma(BoundarySide::right) > 0.0;
  if (dissipated) {
    SteadyStateResult ss = steady_state(model);
    Eigen::MatrixXcd rho = oracle::steady_density_matrix(model);
    Eigen::MatrixXd g_ed = oracle::correlation_matrix_from_density(rho, model.n_cells);
    record("steady_correlation_max_diff",
           (ss.state.gamma - g_ed).cwiseAbs().maxCoeff(), g.tol);

    std::vector<double> times = log_time_grid(0.1, 50.0, 20);
    DensityTrajectory traj =
        density_trajectory(initial_fully_occupied(model.n_cells), model, times);
    oracle::EdTrajectory edt =
        oracle::ed_evolve(oracle::fully_occupied_density(model.n_cells), model, times);
    double max_diff = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      max_diff = std::max(max_diff, std::abs(traj.density[k] - edt.density[k]));
    record("density_trajectory_max_diff", max_diff, g.tol);
  }

  RunManifest m;
  m.command = "validate";
  m.add_model(model).add("tol", g.tol).add("all_pass", all_pass ? 1 : 0);
  std::string path = out_path(g, "validate");
  write_table_file(path, g.format, m, t);
  std::printf("validate: wrote %s (%s)\n", path.c_str(),
              all_pass ? "all checks passed" : "CHECKS FAILED");
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouvillian spectra and relaxation dynamics of the "
               "boundary-dissipated SSH chain"};
  app.set_version_flag("--version", std::string("sshlind ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "key-value model config file")
      ->required();
  app.add_option("--out", g.out_dir, "output directory (default .)");
  app.add_option("--format", g.format, "output format: tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));
  app.add_option("--threads", g.threads, "worker threads for scans")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "tolerance for validate checks");

  app.add_subcommand("rapidity", "reduced-matrix rapidity spectrum with bound flags");

  auto* sc_spectrum =
      app.add_subcommand("spectrum", "Liouvillian spectrum and stripe summary");
  long long max_terms = -1;
  sc_spectrum->add_option("--max-terms", max_terms,
                          "cap on excited rapidities per eigenvalue (-1: all)");

  auto* sc_dyn = app.add_subcommand("dynamics", "particle density relaxation");
  double t_min = 0.1, t_max = 1000.0;
  int points = 200;
  std::string grid = "log";
  bool profile = false, dual = false;
  sc_dyn->add_option("--t-min", t_min, "first time (default 0.1)");
  sc_dyn->add_option("--t-max", t_max, "last time (default 1000)");
  sc_dyn->add_option("--points", points, "number of times (default 200)")
      ->check(CLI::PositiveNumber);
  sc_dyn->add_option("--grid", grid, "log or linear (default log)")
      ->check(CLI::IsMember({"log", "linear"}));
  sc_dyn->add_flag("--profile", profile, "emit per-site density columns");
  sc_dyn->add_flag("--dual", dual, "also run the reciprocal-strength partner");

  auto* sc_gap = app.add_subcommand("gap-scan", "relaxation gap vs size or t1");
  int n_min = 0, n_max = 0, n_step = 2;
  std::string n_list_csv, t1_list_csv;
  sc_gap->add_option("--n-min", n_min, "smallest cell count");
  sc_gap->add_option("--n-max", n_max, "largest cell count");
  sc_gap->add_option("--n-step", n_step, "cell count step (default 2)")
      ->check(CLI::PositiveNumber);
  sc_gap->add_option("--n-list", n_list_csv, "comma-separated cell counts");
  sc_gap->add_option("--t1-list", t1_list_csv,
                     "comma-separated t1 values (fixed n_cells mode)");

  app.add_subcommand("dark-state", "analytic vs numeric dark-state report");
  app.add_subcommand("validate", "brute-force cross-check (n_cells <= 3)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("rapidity")) return cmd_rapidity(g);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(g, max_terms);
    if (app.got_subcommand("dynamics"))
      return cmd_dynamics(g, t_min, t_max, points, grid, profile, dual);
    if (app.got_subcommand("gap-scan"))
      return cmd_gap_scan(g, n_min, n_max, n_step, n_list_csv, t1_list_csv);
    if (app.got_subcommand("dark-state")) return cmd_dark_state(g);
    if (app.got_subcommand("validate")) return cmd_validate(g);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
