#include "freqconn/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace freqconn {

namespace {

constexpr double kEdgeTol = 1e-12;

// Grid position omega * H / (2 pi), snapped to an integer when within rounding
// distance so band edges such as 2 pi / 5 on a 100-point grid land exactly.
double grid_position(double omega, std::size_t grid) {
  const double x = omega * double(grid) / (2.0 * kPi);
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

std::string strip(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  return s;
}

double parse_number(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ValidationError("bad number '" + s + "' in band '" + context + "'");
  return v;
}

// number | [coef][*]pi[/den]
double parse_angle(std::string s, const std::string& context) {
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return parse_number(s, context);
  std::string coef = s.substr(0, pos);
  std::string rest = s.substr(pos + 2);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double value = kPi * (coef.empty() ? 1.0 : parse_number(coef, context));
  if (!rest.empty()) {
    if (rest.front() != '/') throw ValidationError("bad angle '" + s + "' in band '" + context + "'");
    value /= parse_number(rest.substr(1), context);
  }
  return value;
}

} // namespace

BandPartition BandPartition::checked(std::vector<FrequencyBand> bands) {
  BandPartition p(std::move(bands));
  if (!p.is_partition()) {
    std::ostringstream msg;
    msg << "bands do not partition (0, pi]:";
    for (const auto& b : p.bands_) msg << " (" << b.lower << ", " << b.upper << "]";
    throw ValidationError(msg.str());
  }
  return p;
}

BandPartition BandPartition::simulation_default() {
  return BandPartition::checked({FrequencyBand::make(kPi / 2, kPi, "(pi/2,pi]"),
                                 FrequencyBand::make(kPi / 4, kPi / 2, "(pi/4,pi/2]"),
                                 FrequencyBand::make(0.0, kPi / 4, "(0,pi/4]")});
}

bool BandPartition::is_partition() const {
  if (bands_.empty()) return false;
  std::vector<FrequencyBand> sorted = bands_;
  std::sort(sorted.begin(), sorted.end(),
            [](const FrequencyBand& a, const FrequencyBand& b) { return a.lower < b.lower; });
  if (sorted.front().lower != 0.0) return false;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (std::abs(sorted[i].lower - sorted[i - 1].upper) > kEdgeTol) return false;
  return std::abs(sorted.back().upper - kPi) <= kEdgeTol;
}

BandPartition parse_bands(const std::string& text, bool require_partition) {
  std::string body = strip(text);
  std::string unit = "rad";
  if (auto colon = body.rfind(':'); colon != std::string::npos) {
    unit = body.substr(colon + 1);
    body = body.substr(0, colon);
  }
  if (unit != "rad" && unit != "days")
    throw ValidationError("band unit must be 'days' or 'rad', got '" + unit + "'");
  if (body.empty()) throw ValidationError("empty band specification");

  std::vector<std::string> items;
  std::stringstream ss(body);
  for (std::string item; std::getline(ss, item, ',');) items.push_back(item);

  std::vector<FrequencyBand> bands;
  double longest_period = 0.0;
  std::size_t longest_band = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) throw ValidationError("band '" + item + "' is not of the form a-b");
    const std::string lo = item.substr(0, dash), hi = item.substr(dash + 1);
    if (unit == "days") {
      if (lo == "inf") throw ValidationError("'inf' is only allowed on the long end of a band");
      const double shortest = parse_number(lo, item);
      const double longest = hi == "inf" ? INFINITY : parse_number(hi, item);
      bands.push_back(FrequencyBand::from_periods(shortest, longest, item + "d"));
      if (longest > longest_period) {
        longest_period = longest;
        longest_band = i;
      }
    } else {
      if (lo == "inf" || hi == "inf") throw ValidationError("'inf' is not valid for rad bands");
      bands.push_back(FrequencyBand::make(parse_angle(lo, item), parse_angle(hi, item), item));
    }
  }
  // The longest-period band is bounded by the window length in practice; it
  // absorbs the rest of the spectrum down to the zero frequency.
  if (unit == "days") bands[longest_band].lower = 0.0;
  return require_partition ? BandPartition::checked(std::move(bands)) : BandPartition(std::move(bands));
}

std::vector<std::size_t> band_indices(const FrequencyBand& band, std::size_t grid) {
  if (grid < 2) throw ValidationError("frequency grid needs H >= 2");
  const double a = grid_position(band.lower, grid);
  const double b = grid_position(band.upper, grid);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < grid; ++k) {
    const double m = double(std::min(k, grid - k));
    const bool inside = k == 0 ? band.lower == 0.0 : (m > a && m <= b);
    if (inside) out.push_back(k);
  }
  if (out.empty())
    throw EmptyBandError("band " + band.label + " contains no point of the " + std::to_string(grid) +
                         "-point grid; increase the horizon H");
  return out;
}

} // namespace freqconn
