#pragma once

#include "freqconn/report.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace freqconn {

using Json = nlohmann::json;

/// Row-major nested arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const VarModel<double>& model);
VarModel<double> var_model_from_json(const Json& j);

/// Percent units throughout.
Json to_json(const FevdMatrix<double>& f);
Json to_json(const DirectionalSummary<double>& d);
Json to_json(const SpectralDecomposition<double>& s);
Json to_json(const ConnectednessReport& r, const std::vector<std::string>& names);

/// Fixed six-decimal rendering used by every CSV writer.
std::string fixed6(double v);

/// theta_tilde (percent) with a from/to margin, one row per variable.
void write_fevd_csv(std::ostream& out, const FevdMatrix<double>& f, const std::vector<std::string>& names);

/// Long format: band,from,to,value,measure. `from`/`to` are series names for
/// matrix and directional entries and empty for system-wide measures.
void write_spectral_csv(std::ostream& out, const SpectralDecomposition<double>& s,
                        const std::vector<std::string>& names, const std::string& prefix = {},
                        bool header = true);

} // namespace freqconn
