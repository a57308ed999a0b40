#include "freqconn/rolling.hpp"

#include "freqconn/parallel.hpp"
#include "freqconn/rng.hpp"
#include "freqconn/serialize.hpp"

#include <algorithm>
#include <cmath>

namespace freqconn {

void RollingConfig::validate(Eigen::Index n) const {
  if (step < 1) throw ValidationError("rolling step must be >= 1");
  if (var_spec.p < 1) throw ValidationError("lag order must be >= 1");
  if (window_length - var_spec.p <= var_spec.regressors(n))
    throw ValidationError("window of " + std::to_string(window_length) + " observations cannot identify a VAR(" +
                          std::to_string(var_spec.p) + ") with " + std::to_string(var_spec.regressors(n)) +
                          " regressors per equation");
  if (horizon < 2) throw ValidationError("horizon must be >= 2");
  if (partition.size() == 0) throw ValidationError("rolling needs a band partition");
  for (const auto& band : partition.bands()) band_indices(band, horizon); // throws on empty bands
  if (bootstrap) bootstrap->validate();
}

std::size_t ConnectednessPath::gaps() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const PathRecord& r) { return r.gap.has_value(); }));
}

namespace {

WindowMeasures window_measures(const MeasureSet& m) {
  return {m.headline(), m.directional, m.spectral.directional};
}

Vector evaluate_measures(const VarModel<double>& model, const RollingConfig& cfg, bool decorrelated) {
  const auto ma = ma_truncated(model, cfg.horizon);
  const Matrix sigma = decorrelated ? decorrelate(model.sigma) : model.sigma;
  return measure_set(ma, sigma, cfg.partition).headline().flatten();
}

WindowBands to_bands(const BootstrapResult& r, Eigen::Index offset, Eigen::Index count) {
  return {r.corrected.segment(offset, count), r.bands.row(0).segment(offset, count).transpose(),
          r.bands.row(r.bands.rows() - 1).segment(offset, count).transpose()};
}

PathRecord run_window(const TimeSeriesPanel& panel, const RollingConfig& cfg, Eigen::Index start,
                      std::size_t window_index) {
  PathRecord rec;
  rec.start = start;
  rec.date = panel.timestamps()[static_cast<std::size_t>(start + cfg.window_length - 1)];
  rec.ridge = cfg.var_spec.ridge > 0.0;
  try {
    const auto model = estimate_var(panel.values().middleRows(start, cfg.window_length), cfg.var_spec);
    rec.condition_number = model.condition_number;
    rec.spectral_radius = stability(model);
    if (!(rec.spectral_radius < 1.0)) {
      rec.gap = "nonstationary fit (spectral radius " + std::to_string(rec.spectral_radius) + ")";
      return rec;
    }
    const auto report = analyze(model, cfg.horizon, cfg.partition, cfg.decorrelate);
    rec.undefined_points = report.measures.spectral.undefined_count;
    rec.measures = window_measures(report.measures);
    if (report.decorrelated) rec.decorrelated = window_measures(*report.decorrelated);

    if (cfg.bootstrap) {
      BootstrapConfig bc = *cfg.bootstrap;
      bc.seed = splitmix64(bc.seed ^ splitmix64(window_index));
      bc.threads = 1; // windows already run in parallel
      const bool dec = cfg.decorrelate;
      const auto result = bootstrap_window(model, cfg.window_length, bc, [&](const VarModel<double>& m) {
        Vector a = evaluate_measures(m, cfg, false);
        if (!dec) return a;
        Vector b = evaluate_measures(m, cfg, true);
        Vector both(a.size() + b.size());
        both << a, b;
        return both;
      });
      const auto width = static_cast<Eigen::Index>(1 + 2 * cfg.partition.size());
      rec.bands = to_bands(result, 0, width);
      if (dec) rec.decorrelated_bands = to_bands(result, width, width);
    }
  } catch (const NumericalError& e) {
    rec.gap = e.what();
  }
  return rec;
}

} // namespace

ConnectednessPath run_rolling(const TimeSeriesPanel& panel, const RollingConfig& cfg) {
  cfg.validate(panel.cols());
  if (panel.rows() < cfg.window_length)
    throw ValidationError("panel has " + std::to_string(panel.rows()) + " rows, fewer than the window length " +
                          std::to_string(cfg.window_length));
  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + cfg.window_length <= panel.rows(); s += cfg.step) starts.push_back(s);
  if (starts.empty()) throw ValidationError("no complete window");

  ConnectednessPath path;
  path.names = panel.names();
  path.config = cfg;
  path.records.resize(starts.size());
  parallel_for(starts.size(), cfg.threads,
               [&](std::size_t i) { path.records[i] = run_window(panel, cfg, starts[i], i); });
  return path;
}

DifferenceSeries compare_systems(const ConnectednessPath& a, const ConnectednessPath& b) {
  DifferenceSeries out;
  const std::size_t nb = a.config.partition.size() == b.config.partition.size() ? a.config.partition.size() : 0;
  out.within.resize(nb);
  out.frequency.resize(nb);
  std::size_t i = 0, j = 0;
  auto diff = [](const std::optional<double>& x, const std::optional<double>& y) -> std::optional<double> {
    if (x && y) return *x - *y;
    return std::nullopt;
  };
  while (i < a.records.size() && j < b.records.size()) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[j];
    if (ra.date < rb.date) {
      ++i;
    } else if (rb.date < ra.date) {
      ++j;
    } else {
      const bool ok = !ra.gap && !rb.gap;
      out.dates.push_back(ra.date);
      out.total.push_back(ok ? std::optional<double>(ra.measures.headline.total - rb.measures.headline.total)
                             : std::nullopt);
      for (std::size_t k = 0; k < nb; ++k) {
        out.within[k].push_back(ok ? diff(ra.measures.headline.within[k], rb.measures.headline.within[k])
                                   : std::nullopt);
        out.frequency[k].push_back(ok ? std::optional<double>(ra.measures.headline.frequency[k] -
                                                              rb.measures.headline.frequency[k])
                                      : std::nullopt);
      }
      ++i;
      ++j;
    }
  }
  if (out.dates.empty()) throw ValidationError("paths share no dates");
  return out;
}

namespace {

void write_measures(std::ostream& out, const std::string& date, const std::string& prefix,
                    const WindowMeasures& m, const std::vector<std::string>& names, const BandPartition& bands) {
  auto row = [&](const std::string& measure, const std::string& band, const std::string& series,
                 const std::string& value) {
    out << date << ',' << prefix << measure << ',' << band << ',' << series << ',' << value << '\n';
  };
  row("total", "", "", fixed6(m.headline.total));
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& label = bands[b].label;
    row("within", label, "", m.headline.within[b] ? fixed6(*m.headline.within[b]) : "NA");
    row("frequency", label, "", fixed6(m.headline.frequency[b]));
  }
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    row("from_others", "", names[j], fixed6(m.directional.from_others(jj)));
    row("to_others", "", names[j], fixed6(m.directional.to_others(jj)));
    row("net", "", names[j], fixed6(m.directional.net(jj)));
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto& d = m.band_directional[b];
      row("from_others", bands[b].label, names[j], fixed6(d.from_others(jj)));
      row("to_others", bands[b].label, names[j], fixed6(d.to_others(jj)));
      row("net", bands[b].label, names[j], fixed6(d.net(jj)));
    }
  }
}

void write_bands(std::ostream& out, const std::string& date, const std::string& prefix, const WindowBands& wb,
                 const BandPartition& bands) {
  const auto names = measure_names(bands);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto colon = names[i].find(':');
    const std::string measure = names[i].substr(0, colon);
    const std::string band = colon == std::string::npos ? "" : names[i].substr(colon + 1);
    out << date << ',' << prefix << measure << "_corrected," << band << ",," << fixed6(wb.corrected(ii)) << '\n';
    out << date << ',' << prefix << measure << "_lo," << band << ",," << fixed6(wb.lower(ii)) << '\n';
    out << date << ',' << prefix << measure << "_hi," << band << ",," << fixed6(wb.upper(ii)) << '\n';
  }
}

Json measures_json(const WindowMeasures& m, const BandPartition& bands) {
  Json per_band = Json::array();
  for (std::size_t b = 0; b < bands.size(); ++b) {
    per_band.push_back({{"label", bands[b].label},
                        {"within", m.headline.within[b] ? Json(*m.headline.within[b]) : Json(nullptr)},
                        {"frequency", m.headline.frequency[b]},
                        {"directional", to_json(m.band_directional[b])}});
  }
  return {{"total", m.headline.total}, {"directional", to_json(m.directional)}, {"bands", per_band}};
}

Json bands_json(const WindowBands& wb, const BandPartition& bands) {
  const auto names = measure_names(bands);
  Json j = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    j[names[i]] = {{"corrected", wb.corrected(ii)}, {"lo", wb.lower(ii)}, {"hi", wb.upper(ii)}};
  }
  return j;
}

} // namespace

void write_path_csv(std::ostream& out, const ConnectednessPath& path) {
  const auto& bands = path.config.partition;
  out << "date,measure,band,series,value\n";
  for (const auto& rec : path.records) {
    const std::string date = format_iso_date(rec.date);
    if (rec.gap) {
      out << date << ",gap,,," << "NA" << '\n';
      continue;
    }
    write_measures(out, date, "", rec.measures, path.names, bands);
    if (rec.decorrelated) write_measures(out, date, "nocorr:", *rec.decorrelated, path.names, bands);
    if (rec.bands) write_bands(out, date, "", *rec.bands, bands);
    if (rec.decorrelated_bands) write_bands(out, date, "nocorr:", *rec.decorrelated_bands, bands);
  }
}

Json to_json(const ConnectednessPath& path) {
  const auto& cfg = path.config;
  Json bands = Json::array();
  for (const auto& b : cfg.partition.bands()) bands.push_back({{"label", b.label}, {"lower", b.lower}, {"upper", b.upper}});
  Json records = Json::array();
  for (const auto& rec : path.records) {
    Json r = {{"date", format_iso_date(rec.date)},
              {"start", rec.start},
              {"spectral_radius", rec.spectral_radius},
              {"condition_number", rec.condition_number},
              {"ridge", rec.ridge},
              {"undefined_points", rec.undefined_points}};
    if (rec.gap) {
      r["gap"] = *rec.gap;
    } else {
      r["measures"] = measures_json(rec.measures, cfg.partition);
      if (rec.decorrelated) r["decorrelated"] = measures_json(*rec.decorrelated, cfg.partition);
      if (rec.bands) r["bootstrap"] = bands_json(*rec.bands, cfg.partition);
      if (rec.decorrelated_bands) r["decorrelated_bootstrap"] = bands_json(*rec.decorrelated_bands, cfg.partition);
    }
    records.push_back(std::move(r));
  }
  return {{"series", path.names},
          {"window_length", cfg.window_length},
          {"step", cfg.step},
          {"lags", cfg.var_spec.p},
          {"intercept", cfg.var_spec.include_intercept},
          {"ridge", cfg.var_spec.ridge},
          {"horizon", cfg.horizon},
          {"bands", bands},
          {"gaps", path.gaps()},
          {"records", records}};
}

void write_difference_csv(std::ostream& out, const DifferenceSeries& diff, const BandPartition& bands) {
  out << "date,measure,band,value\n";
  auto v = [](const std::optional<double>& x) { return x ? fixed6(*x) : std::string("NA"); };
  for (std::size_t t = 0; t < diff.dates.size(); ++t) {
    const std::string date = format_iso_date(diff.dates[t]);
    out << date << ",total,," << v(diff.total[t]) << '\n';
    for (std::size_t b = 0; b < diff.within.size(); ++b) {
      out << date << ",within," << bands[b].label << ',' << v(diff.within[b][t]) << '\n';
      out << date << ",frequency," << bands[b].label << ',' << v(diff.frequency[b][t]) << '\n';
    }
  }
}

} // namespace freqconn
