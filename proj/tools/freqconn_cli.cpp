#include "manifest.hpp"

#include "freqconn/bootstrap.hpp"
#include "freqconn/panel.hpp"
#include "freqconn/parallel.hpp"
#include "freqconn/report.hpp"
#include "freqconn/rolling.hpp"
#include "freqconn/rng.hpp"
#include "freqconn/serialize.hpp"
#include "freqconn/simulate.hpp"
#include "freqconn/svg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace freqconn;
using cli::RunManifest;

namespace {

constexpr int kValidationExit = 2;
constexpr int kNumericalExit = 3;

struct Options {
  std::string config;
  std::string input;
  std::string date_column;
  std::string series;
  bool intraday = false;
  double rv_power = 1.0;
  int lags = 2;
  bool intercept = true;
  std::optional<std::size_t> horizon;
  std::string bands;
  bool require_partition = true;
  bool decorrelate = false;
  double ridge = 0.0;
  double max_condition = 1e10;
  long window = 300;
  long step = 1;
  unsigned threads = 0;
  int bootstrap = 0;
  std::uint64_t seed = 0;
  std::string bootstrap_mode = "resample_residuals";
  std::string quantiles = "0.05,0.95";
  bool bias_correct = true;
  bool svg = false;
  std::string out;
  std::string grid;
  int replications = 100;
  bool population = false;
  bool null_system = false;
  int null_length = 1000;
  int null_dim = 2;
  std::string manifest;
};

using Config = std::vector<std::pair<std::string, std::string>>;

std::string str(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string str(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string str(T v)
  requires std::is_integral_v<T>
{
  return std::to_string(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string absolute(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

// ---- option registration -------------------------------------------------

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "key=value file; flags given on the command line win");
  app->add_option("--out", o.out, "Output directory")->required();
  app->add_option("--threads", o.threads, "Worker cap (0: all hardware threads)");
}

void add_panel(CLI::App* app, Options& o) {
  app->add_option("--input", o.input, "Panel CSV (or intraday returns with --intraday)");
  app->add_option("--date-column", o.date_column, "Name of the date column (default: first column)");
  app->add_option("--series", o.series, "Comma-separated subset of series");
  app->add_flag("--intraday,!--no-intraday", o.intraday, "Input holds intraday returns: date,time,series,return");
  app->add_option("--rv-power", o.rv_power, "Realized volatility: power * log(sum r^2)")
      ->check(CLI::IsMember({1.0, 0.5}));
}

void add_model(CLI::App* app, Options& o) {
  app->add_option("--lags", o.lags, "VAR lag order")->check(CLI::PositiveNumber);
  app->add_flag("--intercept,!--no-intercept", o.intercept, "Include an intercept");
  app->add_option("--ridge", o.ridge, "Ridge penalty on lag coefficients (0: off)")->check(CLI::NonNegativeNumber);
  app->add_option("--max-condition", o.max_condition, "Largest accepted design condition number");
}

void add_spectral(CLI::App* app, Options& o) {
  app->add_option("--horizon", o.horizon, "Forecast horizon H, also the frequency grid size");
  app->add_option("--bands", o.bands, "Band list, e.g. \"1-5,5-20,20-inf:days\" or \"0-pi/2,pi/2-pi:rad\"");
  app->add_flag("--require-partition,!--no-require-partition", o.require_partition,
                "Bands must tile (0,pi] without gaps or overlaps");
  app->add_flag("--decorrelate,!--no-decorrelate", o.decorrelate,
                "Also report measures with the off-diagonal covariances zeroed");
}

void add_bootstrap(CLI::App* app, Options& o) {
  app->add_option("--bootstrap", o.bootstrap, "Bootstrap replications (0: off)")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--bootstrap-mode", o.bootstrap_mode, "gaussian or resample_residuals");
  app->add_option("--quantiles", o.quantiles, "Comma-separated band quantiles");
  app->add_flag("--bias-correct,!--no-bias-correct", o.bias_correct, "Subtract the bootstrap bias");
}

// ---- resolved configs ------------------------------------------------------

Config panel_config(const Options& o) {
  return {{"input", absolute(o.input)}, {"date-column", o.date_column}, {"series", o.series},
          {"intraday", str(o.intraday)}, {"rv-power", str(o.rv_power)}};
}

Config model_config(const Options& o) {
  return {{"lags", str(o.lags)}, {"intercept", str(o.intercept)}, {"ridge", str(o.ridge)},
          {"max-condition", str(o.max_condition)}};
}

Config spectral_config(const Options& o, std::size_t horizon) {
  return {{"horizon", str(horizon)}, {"bands", o.bands}, {"require-partition", str(o.require_partition)},
          {"decorrelate", str(o.decorrelate)}};
}

Config bootstrap_config(const Options& o) {
  return {{"bootstrap", str(o.bootstrap)}, {"seed", str(o.seed)}, {"bootstrap-mode", o.bootstrap_mode},
          {"quantiles", o.quantiles}, {"bias-correct", str(o.bias_correct)}};
}

Config join(std::initializer_list<Config> parts) {
  Config out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// ---- shared helpers --------------------------------------------------------

TimeSeriesPanel select(const TimeSeriesPanel& panel, const std::vector<std::string>& wanted) {
  Matrix m(panel.rows(), static_cast<Eigen::Index>(wanted.size()));
  for (std::size_t j = 0; j < wanted.size(); ++j) {
    const auto& names = panel.names();
    const auto it = std::find(names.begin(), names.end(), wanted[j]);
    if (it == names.end()) throw ValidationError("series '" + wanted[j] + "' not found in input");
    m.col(static_cast<Eigen::Index>(j)) = panel.values().col(it - names.begin());
  }
  return {panel.timestamps(), wanted, std::move(m)};
}

TimeSeriesPanel read_panel(const Options& o, RunManifest& manifest) {
  if (o.input.empty()) throw ValidationError("--input is required");
  if (!fs::exists(o.input)) throw LoadError("input file '" + o.input + "' does not exist");
  manifest.add_input(o.input);
  const auto wanted = split(o.series, ',');
  if (o.intraday) {
    auto panel = realized_log_volatility(load_intraday(o.input), o.rv_power);
    return wanted.empty() ? panel : select(panel, wanted);
  }
  return load_panel(o.input, o.date_column,
                    wanted.empty() ? std::nullopt : std::optional<std::vector<std::string>>(wanted));
}

VarSpec var_spec(const Options& o) {
  VarSpec s;
  s.p = o.lags;
  s.include_intercept = o.intercept;
  s.ridge = o.ridge;
  s.max_condition = o.max_condition;
  return s;
}

BootstrapConfig bootstrap_cfg(const Options& o) {
  BootstrapConfig b;
  b.replications = o.bootstrap;
  b.innovation_mode = innovation_mode_from_string(o.bootstrap_mode);
  b.seed = o.seed;
  b.quantiles.clear();
  for (const auto& q : split(o.quantiles, ',')) {
    try {
      b.quantiles.push_back(std::stod(q));
    } catch (const std::exception&) {
      throw ValidationError("quantile '" + q + "' is not a number");
    }
  }
  b.bias_correct = o.bias_correct;
  b.threads = resolve_threads(o.threads);
  b.validate();
  return b;
}

void note_bootstrap_choices(RunManifest& m) {
  m.add_note("bootstrap defaults (B=500, resample_residuals, burn-in 100, measure-level bias correction) are "
             "artifact choices; the source does not report them");
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ValidationError("cannot create output directory '" + out + "'");
  return dir;
}

void write_text(const fs::path& path, const std::string& text, RunManifest& manifest) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path.string() + "'");
  f << text;
  f.close();
  manifest.add_output(path);
}

std::string slug(const std::string& label) {
  std::string s;
  for (char c : label) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

// ---- estimate ---------------------------------------------------------------

int cmd_estimate(const Options& o) {
  const std::size_t H = o.horizon.value_or(100);
  RunManifest manifest("estimate",
                       join({panel_config(o), model_config(o), spectral_config(o, H),
                             {{"svg", str(o.svg)}, {"threads", str(o.threads)}, {"out", absolute(o.out)}}}));
  const auto partition = parse_bands(o.bands, o.require_partition);
  const auto panel = read_panel(o, manifest);
  const auto dir = prepare_out(o.out);

  const auto model = estimate_var(panel, var_spec(o));
  const double radius = stability(model);
  if (!(radius < 1.0))
    throw InstabilityError("fitted VAR is nonstationary (spectral radius " + std::to_string(radius) +
                           "); the MA truncation does not converge");
  const auto report = analyze(model, H, partition, o.decorrelate);

  auto j = to_json(report, panel.names());
  j["sample"] = {{"first", format_iso_date(panel.timestamps().front())},
                 {"last", format_iso_date(panel.timestamps().back())},
                 {"rows", panel.rows()}};
  j["bands"] = Json::array();
  for (const auto& b : partition.bands()) j["bands"].push_back({{"label", b.label}, {"lower", b.lower}, {"upper", b.upper}});
  Json reached = Json::array();
  for (const auto& h : msfe_convergence(model, H, 1e-6)) reached.push_back(h ? Json(*h) : Json(nullptr));
  j["msfe_horizon_reached"] = reached;
  j["undefined_frequency_points"] = report.measures.spectral.undefined_count;
  if (report.measures.spectral.undefined_count > 0)
    manifest.add_failure("spectrum", std::to_string(report.measures.spectral.undefined_count) +
                                         " frequency points with zero power were skipped");

  write_text(dir / "report.json", j.dump(2) + "\n", manifest);
  std::ostringstream csv;
  write_spectral_csv(csv, report.measures.spectral, panel.names());
  if (report.decorrelated) write_spectral_csv(csv, report.decorrelated->spectral, panel.names(), "nocorr:", false);
  write_text(dir / "tables.csv", csv.str(), manifest);

  if (o.svg) {
    const auto& s = report.measures.spectral;
    write_text(dir / "heatmap_total.svg",
               svg::heatmap("Pairwise connectedness, all frequencies", 100.0 * report.measures.fevd.theta_tilde,
                            panel.names(), panel.names()),
               manifest);
    for (std::size_t b = 0; b < partition.size(); ++b)
      write_text(dir / ("heatmap_" + slug(partition[b].label) + ".svg"),
                 svg::heatmap("Pairwise connectedness, band " + partition[b].label, 100.0 * s.theta_tilde[b],
                              panel.names(), panel.names()),
                 manifest);
  }
  manifest.write(dir);
  std::printf("total connectedness %.4f over %zu series; outputs in %s\n", report.measures.total(),
              panel.names().size(), o.out.c_str());
  return 0;
}

// ---- rolling ----------------------------------------------------------------

std::vector<std::optional<double>> series_of(const ConnectednessPath& path, bool decorrelated,
                                             const std::function<std::optional<double>(const BandMeasures&)>& f) {
  std::vector<std::optional<double>> out;
  for (const auto& r : path.records) {
    if (r.gap || (decorrelated && !r.decorrelated)) {
      out.emplace_back();
      continue;
    }
    out.push_back(f(decorrelated ? r.decorrelated->headline : r.measures.headline));
  }
  return out;
}

std::optional<std::vector<std::optional<double>>> band_of(const ConnectednessPath& path, bool decorrelated,
                                                          bool upper, Eigen::Index index) {
  std::vector<std::optional<double>> out;
  bool any = false;
  for (const auto& r : path.records) {
    const auto& wb = decorrelated ? r.decorrelated_bands : r.bands;
    if (r.gap || !wb) {
      out.emplace_back();
      continue;
    }
    any = true;
    out.push_back(upper ? wb->upper(index) : wb->lower(index));
  }
  if (!any) return std::nullopt;
  return out;
}

void rolling_svgs(const ConnectednessPath& path, const fs::path& dir, RunManifest& manifest) {
  const auto& bands = path.config.partition;
  const auto nb = static_cast<Eigen::Index>(bands.size());
  std::vector<std::string> dates;
  for (const auto& r : path.records) dates.push_back(format_iso_date(r.date));
  const bool dec = path.config.decorrelate;

  svg::LineChart total{"Total connectedness", dates, {}};
  svg::LineChart within{"Within-band connectedness", dates, {}};
  svg::LineChart freq{"Frequency connectedness", dates, {}};
  for (int pass = 0; pass < (dec ? 2 : 1); ++pass) {
    const bool d = pass == 1;
    const std::string suffix = d ? " (decorrelated)" : "";
    total.lines.push_back({"total" + suffix, series_of(path, d, [](const BandMeasures& m) { return m.total; }),
                           band_of(path, d, false, 0), band_of(path, d, true, 0)});
    for (Eigen::Index b = 0; b < nb; ++b) {
      const auto bb = static_cast<std::size_t>(b);
      within.lines.push_back({bands[bb].label + suffix,
                              series_of(path, d, [bb](const BandMeasures& m) { return m.within[bb]; }),
                              band_of(path, d, false, 1 + b), band_of(path, d, true, 1 + b)});
      freq.lines.push_back({bands[bb].label + suffix,
                            series_of(path, d, [bb](const BandMeasures& m) { return m.frequency[bb]; }),
                            band_of(path, d, false, 1 + nb + b), band_of(path, d, true, 1 + nb + b)});
    }
  }
  write_text(dir / "total.svg", svg::render(total), manifest);
  write_text(dir / "within.svg", svg::render(within), manifest);
  write_text(dir / "frequency.svg", svg::render(freq), manifest);

  Matrix heat(nb, static_cast<Eigen::Index>(path.records.size()));
  for (std::size_t t = 0; t < path.records.size(); ++t) {
    const auto& r = path.records[t];
    for (Eigen::Index b = 0; b < nb; ++b)
      heat(b, static_cast<Eigen::Index>(t)) =
          r.gap ? std::numeric_limits<double>::quiet_NaN() : r.measures.headline.frequency[std::size_t(b)];
  }
  std::vector<std::string> labels;
  for (const auto& b : bands.bands()) labels.push_back(b.label);
  write_text(dir / "heatmap.svg", svg::heatmap("Frequency connectedness by band", heat, labels, dates), manifest);
}

int cmd_rolling(const Options& o) {
  const std::size_t H = o.horizon.value_or(100);
  RunManifest manifest("rolling",
                       join({panel_config(o), model_config(o), spectral_config(o, H),
                             {{"window", str(o.window)}, {"step", str(o.step)}},
                             bootstrap_config(o),
                             {{"svg", str(o.svg)}, {"threads", str(o.threads)}, {"out", absolute(o.out)}}}));
  RollingConfig cfg;
  cfg.window_length = o.window;
  cfg.step = o.step;
  cfg.var_spec = var_spec(o);
  cfg.horizon = H;
  cfg.partition = parse_bands(o.bands, o.require_partition);
  cfg.decorrelate = o.decorrelate;
  cfg.threads = o.threads;
  if (o.bootstrap > 0) {
    cfg.bootstrap = bootstrap_cfg(o);
    manifest.set_seed(o.seed);
    note_bootstrap_choices(manifest);
  }
  const auto panel = read_panel(o, manifest);
  const auto dir = prepare_out(o.out);

  const auto path = run_rolling(panel, cfg);
  for (const auto& r : path.records)
    if (r.gap) manifest.add_failure(format_iso_date(r.date), *r.gap);

  std::ostringstream csv;
  write_path_csv(csv, path);
  write_text(dir / "path.csv", csv.str(), manifest);
  write_text(dir / "path.json", to_json(path).dump(2) + "\n", manifest);
  if (o.svg) rolling_svgs(path, dir, manifest);
  manifest.write(dir);
  std::printf("%zu windows (%zu gaps); outputs in %s\n", path.records.size(), path.gaps(), o.out.c_str());
  return 0;
}

// ---- simulate -----------------------------------------------------------------

int cmd_simulate(const Options& o) {
  const std::size_t H = o.horizon.value_or(o.population ? 2048 : 1000);
  const auto partition = o.bands.empty() ? BandPartition::simulation_default() : parse_bands(o.bands, o.require_partition);
  RunManifest manifest("simulate", {{"grid", absolute(o.grid)},
                                    {"replications", str(o.replications)},
                                    {"seed", str(o.seed)},
                                    {"horizon", str(H)},
                                    {"bands", o.bands},
                                    {"require-partition", str(o.require_partition)},
                                    {"population", str(o.population)},
                                    {"threads", str(o.threads)},
                                    {"out", absolute(o.out)}});
  if (o.grid.empty()) throw ValidationError("--grid is required");
  if (!fs::exists(o.grid)) throw LoadError("grid file '" + o.grid + "' does not exist");
  manifest.add_input(o.grid);
  const auto grid = load_grid(o.grid);
  if (grid.empty()) throw ValidationError("grid '" + o.grid + "' has no rows");
  const auto dir = prepare_out(o.out);

  if (o.population) {
    std::ostringstream csv;
    write_population_csv(csv, grid, H, partition);
    write_text(dir / "population.csv", csv.str(), manifest);
    manifest.write(dir);
    std::printf("population values for %zu specs; outputs in %s\n", grid.size(), o.out.c_str());
    return 0;
  }

  manifest.set_seed(o.seed);
  manifest.add_note("fitted model in every replication is a VAR(1) without intercept");
  const auto table = run_study(grid, o.replications, partition, H, o.seed, o.threads);
  for (std::size_t c = 0; c < table.cells.size(); ++c)
    if (table.cells[c].redraws > 0)
      manifest.add_failure("cell " + std::to_string(c), std::to_string(table.cells[c].redraws) +
                                                            " nonstationary fits redrawn");
  std::ostringstream csv;
  write_table_csv(csv, table);
  write_text(dir / "table.csv", csv.str(), manifest);
  write_text(dir / "table.json", to_json(table).dump(2) + "\n", manifest);
  manifest.write(dir);
  std::printf("%zu cells x %d replications; outputs in %s\n", table.cells.size(), o.replications, o.out.c_str());
  return 0;
}

// ---- bootstrap-check --------------------------------------------------------------

int cmd_bootstrap_check(const Options& o) {
  const std::size_t H = o.horizon.value_or(100);
  Options b = o;
  if (b.bootstrap == 0) b.bootstrap = 500;
  if (o.bands.empty()) b.bands = "1-5,5-20,20-inf:days";
  RunManifest manifest("bootstrap-check",
                       join({o.null_system ? Config{{"null", "true"},
                                                    {"null-length", str(o.null_length)},
                                                    {"null-dim", str(o.null_dim)}}
                                           : panel_config(o),
                             model_config(o), spectral_config(b, H), bootstrap_config(b),
                             {{"threads", str(o.threads)}, {"out", absolute(o.out)}}}));
  manifest.set_seed(b.seed);
  note_bootstrap_choices(manifest);
  const auto partition = parse_bands(b.bands, b.require_partition);
  const auto cfg = bootstrap_cfg(b);

  TimeSeriesPanel panel = [&] {
    if (!o.null_system) return read_panel(o, manifest);
    if (o.null_dim < 1 || o.null_length < 2) throw ValidationError("null system needs dim >= 1 and length >= 2");
    auto rng = keyed_stream(b.seed, {0x5EEDu});
    std::normal_distribution<double> normal;
    Matrix x(o.null_length, o.null_dim);
    for (Eigen::Index t = 0; t < x.rows(); ++t)
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(t, j) = normal(rng);
    std::vector<std::string> names;
    for (int j = 0; j < o.null_dim; ++j) names.push_back("w" + std::to_string(j + 1));
    return TimeSeriesPanel(business_days(Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}},
                                         static_cast<std::size_t>(o.null_length)),
                           names, std::move(x));
  }();
  const auto dir = prepare_out(o.out);

  const auto model = estimate_var(panel, var_spec(o));
  const auto result = bootstrap_window(model, panel.rows(), cfg, [&](const VarModel<double>& m) {
    return measure_set(ma_truncated(m, H), m.sigma, partition).headline().flatten();
  });
  if (result.redraws > 0) manifest.add_failure("bootstrap", std::to_string(result.redraws) + " replications redrawn");

  const auto names = measure_names(partition);
  std::ostringstream csv;
  csv << "measure,point,mean,bias,corrected";
  for (double q : cfg.quantiles) csv << ",q" << str(q);
  csv << '\n';
  Json measures = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    csv << names[i] << ',' << fixed6(result.point(ii)) << ',' << fixed6(result.mean(ii)) << ','
        << fixed6(result.bias(ii)) << ',' << fixed6(result.corrected(ii));
    Json q = Json::array();
    for (Eigen::Index k = 0; k < result.bands.rows(); ++k) {
      csv << ',' << fixed6(result.bands(k, ii));
      q.push_back(result.bands(k, ii));
    }
    csv << '\n';
    measures[names[i]] = {{"point", result.point(ii)},
                          {"mean", result.mean(ii)},
                          {"bias", result.bias(ii)},
                          {"corrected", result.corrected(ii)},
                          {"quantiles", q}};
  }
  write_text(dir / "bootstrap.csv", csv.str(), manifest);
  Json j = {{"series", panel.names()},
            {"replications", cfg.replications},
            {"innovation_mode", to_string(cfg.innovation_mode)},
            {"quantile_levels", cfg.quantiles},
            {"bias_correct", cfg.bias_correct},
            {"redraws", result.redraws},
            {"spectral_radius", stability(model)},
            {"measures", measures}};
  write_text(dir / "bootstrap.json", j.dump(2) + "\n", manifest);
  manifest.write(dir);
  std::printf("bootstrap total: point %.4f corrected %.4f [%.4f, %.4f]; outputs in %s\n", result.point(0),
              result.corrected(0), result.bands(0, 0), result.bands(result.bands.rows() - 1, 0), o.out.c_str());
  return 0;
}

// ---- config files ------------------------------------------------------------------

/// Expands `--config FILE` into `--key=value` arguments placed right after the
/// subcommand so that explicit flags, parsed later, take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(path + ":" + std::to_string(n) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    std::replace(key.begin(), key.end(), '_', '-');
    extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

int run(std::vector<std::string> args);

int cmd_rerun(const Options& o) {
  const auto m = RunManifest::read(o.manifest);
  if (!m.contains("argv") || !m["argv"].is_array()) throw ValidationError("manifest has no argv");
  std::vector<std::string> argv = m["argv"].get<std::vector<std::string>>();
  if (argv.empty() || argv[0] == "rerun") throw ValidationError("manifest argv is not a rerunnable command");
  for (auto& a : argv)
    if (a.rfind("--out=", 0) == 0) a = "--out=" + absolute(o.out);
  const int code = run(argv);
  if (code != 0) return code;

  std::size_t checked = 0, differ = 0;
  for (const auto& entry : m.value("outputs", Json::array())) {
    const fs::path f = fs::path(o.out) / entry.at("file").get<std::string>();
    ++checked;
    if (!fs::exists(f) || cli::sha256_file(f) != entry.at("sha256").get<std::string>()) {
      ++differ;
      std::fprintf(stderr, "rerun: %s differs from the recorded digest\n", f.string().c_str());
    }
  }
  if (differ > 0) return kNumericalExit;
  std::printf("rerun reproduced %zu outputs bit-identically\n", checked);
  return 0;
}

int run(std::vector<std::string> args) {
  Options o;
  CLI::App app{"Frequency-domain connectedness of multivariate time series"};
  app.set_version_flag("--version", FREQCONN_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* estimate = app.add_subcommand("estimate", "Static connectedness report for one panel");
  add_common(estimate, o);
  add_panel(estimate, o);
  add_model(estimate, o);
  add_spectral(estimate, o);
  estimate->add_flag("--svg,!--no-svg", o.svg, "Write pairwise heatmaps");

  auto* rolling = app.add_subcommand("rolling", "Rolling-window connectedness path");
  add_common(rolling, o);
  add_panel(rolling, o);
  add_model(rolling, o);
  add_spectral(rolling, o);
  add_bootstrap(rolling, o);
  rolling->add_option("--window", o.window, "Window length in observations")->check(CLI::PositiveNumber);
  rolling->add_option("--step", o.step, "Window step")->check(CLI::PositiveNumber);
  rolling->add_flag("--svg,!--no-svg", o.svg, "Write line charts and a heatmap");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study or population values over a grid");
  add_common(simulate, o);
  simulate->add_option("--grid", o.grid, "Grid CSV: beta1,beta2,s,rho[,T,burn]");
  simulate->add_option("--replications", o.replications, "Replications per cell");
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--horizon", o.horizon, "H (default 1000, or 2048 with --population)");
  simulate->add_option("--bands", o.bands, "Band list (default: (pi/2,pi], (pi/4,pi/2], (0,pi/4])");
  simulate->add_flag("--require-partition,!--no-require-partition", o.require_partition, "Bands must tile (0,pi]");
  simulate->add_flag("--population,!--no-population", o.population, "Population values from the true coefficients");

  auto* boot = app.add_subcommand("bootstrap-check", "Bootstrap bias correction and bands on one panel");
  add_common(boot, o);
  add_panel(boot, o);
  add_model(boot, o);
  add_spectral(boot, o);
  add_bootstrap(boot, o);
  boot->add_flag("--null,!--no-null", o.null_system, "Use a simulated white-noise panel instead of --input");
  boot->add_option("--null-length", o.null_length, "Rows of the white-noise panel");
  boot->add_option("--null-dim", o.null_dim, "Series of the white-noise panel");

  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest and verify the outputs");
  rerun->add_option("--manifest", o.manifest, "manifest.json of the earlier run")->required();
  rerun->add_option("--out", o.out, "Output directory for the repeated run")->required();

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end()); // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidationExit;
  }

  if (o.bands.empty() && !simulate->parsed()) o.bands = "1-5,5-20,20-inf:days";
  if (estimate->parsed()) return cmd_estimate(o);
  if (rolling->parsed()) return cmd_rolling(o);
  if (simulate->parsed()) return cmd_simulate(o);
  if (boot->parsed()) return cmd_bootstrap_check(o);
  return cmd_rerun(o);
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidationExit;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidationExit;
  }
}
