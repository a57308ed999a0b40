#include "freqconn/serialize.hpp"

#include <cstdio>

namespace freqconn {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index(0) : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != cols) throw ValidationError("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

namespace {

Json vector_to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const Json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Json optional_to_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

} // namespace

Json to_json(const VarModel<double>& model) {
  Json phi = Json::array();
  for (const auto& a : model.phi) phi.push_back(matrix_to_json(a));
  return {{"p", model.spec.p},
          {"include_intercept", model.spec.include_intercept},
          {"ridge", model.spec.ridge},
          {"z", model.z},
          {"effective_length", model.effective_length()},
          {"condition_number", model.condition_number},
          {"phi", phi},
          {"intercept", vector_to_json(model.intercept)},
          {"sigma", matrix_to_json(model.sigma)},
          {"residuals", matrix_to_json(model.residuals)}};
}

VarModel<double> var_model_from_json(const Json& j) {
  VarModel<double> m;
  m.spec.p = j.at("p").get<int>();
  m.spec.include_intercept = j.at("include_intercept").get<bool>();
  m.spec.ridge = j.value("ridge", 0.0);
  m.z = j.at("z").get<int>();
  m.condition_number = j.value("condition_number", 0.0);
  for (const auto& a : j.at("phi")) m.phi.push_back(matrix_from_json(a));
  m.intercept = vector_from_json(j.at("intercept"));
  m.sigma = matrix_from_json(j.at("sigma"));
  if (j.contains("residuals") && !j.at("residuals").empty()) m.residuals = matrix_from_json(j.at("residuals"));
  if (static_cast<int>(m.phi.size()) != m.spec.p) throw ValidationError("phi count does not match p");
  return m;
}

Json to_json(const FevdMatrix<double>& f) {
  return {{"horizon", f.horizon},
          {"theta", matrix_to_json(100.0 * f.theta)},
          {"theta_tilde", matrix_to_json(100.0 * f.theta_tilde)},
          {"total", total_connectedness(f)}};
}

Json to_json(const DirectionalSummary<double>& d) {
  return {{"from_others", vector_to_json(d.from_others)},
          {"to_others", vector_to_json(d.to_others)},
          {"net", vector_to_json(d.net)},
          {"pairwise_net", matrix_to_json(d.pairwise_net)},
          {"total", d.total}};
}

Json to_json(const SpectralDecomposition<double>& s) {
  Json bands = Json::array();
  for (std::size_t b = 0; b < s.bands.size(); ++b) {
    const auto& band = s.bands[b];
    bands.push_back({{"label", band.label},
                     {"lower", band.lower},
                     {"upper", band.upper},
                     {"within", optional_to_json(s.within[b])},
                     {"frequency", s.frequency[b]},
                     {"theta_tilde", matrix_to_json(100.0 * s.theta_tilde[b])},
                     {"directional", to_json(s.directional[b])}});
  }
  return {{"grid", s.grid},
          {"total", s.total},
          {"undefined_points", s.undefined_count},
          {"theta_tilde", matrix_to_json(100.0 * s.theta_tilde_full)},
          {"bands", bands}};
}

namespace {

Json measure_set_json(const MeasureSet& m) {
  return {{"total", m.total()},
          {"fevd", to_json(m.fevd)},
          {"directional", to_json(m.directional)},
          {"spectral", to_json(m.spectral)}};
}

} // namespace

Json to_json(const ConnectednessReport& r, const std::vector<std::string>& names) {
  Json j = {{"series", names},
            {"horizon", r.horizon},
            {"spectral_radius", r.spectral_radius},
            {"stationary", r.spectral_radius < 1.0},
            {"ridge", r.model.spec.ridge},
            {"model", to_json(r.model)},
            {"measures", measure_set_json(r.measures)}};
  if (r.decorrelated) j["decorrelated"] = measure_set_json(*r.decorrelated);
  return j;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_fevd_csv(std::ostream& out, const FevdMatrix<double>& f, const std::vector<std::string>& names) {
  const auto d = directional(f);
  out << "variable";
  for (const auto& n : names) out << ',' << n;
  out << ",from_others\n";
  for (Eigen::Index j = 0; j < f.theta_tilde.rows(); ++j) {
    out << names[j];
    for (Eigen::Index k = 0; k < f.theta_tilde.cols(); ++k) out << ',' << fixed6(100.0 * f.theta_tilde(j, k));
    out << ',' << fixed6(d.from_others(j)) << '\n';
  }
  out << "to_others";
  for (Eigen::Index k = 0; k < d.to_others.size(); ++k) out << ',' << fixed6(d.to_others(k));
  out << ',' << fixed6(d.total) << '\n';
}

void write_spectral_csv(std::ostream& out, const SpectralDecomposition<double>& s,
                        const std::vector<std::string>& names, const std::string& prefix, bool header) {
  if (header) out << "band,from,to,value,measure\n";
  auto row = [&](const std::string& band, const std::string& from, const std::string& to,
                 const std::string& value, const std::string& measure) {
    out << band << ',' << from << ',' << to << ',' << value << ',' << prefix << measure << '\n';
  };
  row("total", "", "", fixed6(s.total), "total");
  for (std::size_t b = 0; b < s.bands.size(); ++b) {
    const std::string& label = s.bands[b].label;
    row(label, "", "", s.within[b] ? fixed6(*s.within[b]) : "NA", "within");
    row(label, "", "", fixed6(s.frequency[b]), "frequency");
    const auto& d = s.directional[b];
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      row(label, names[j], "", fixed6(d.from_others(jj)), "from_others");
      row(label, "", names[j], fixed6(d.to_others(jj)), "to_others");
      row(label, names[j], "", fixed6(d.net(jj)), "net");
      for (std::size_t k = 0; k < names.size(); ++k)
        row(label, names[k], names[j], fixed6(100.0 * s.theta_tilde[b](jj, static_cast<Eigen::Index>(k))),
            "theta_tilde");
    }
  }
}

} // namespace freqconn
