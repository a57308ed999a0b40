#include "manifest.hpp"

#include "freqconn/core.hpp"

#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>
#include <memory>

#ifndef FREQCONN_VERSION
#define FREQCONN_VERSION "unknown"
#endif

namespace freqconn::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

RunManifest::RunManifest(std::string command, std::vector<std::pair<std::string, std::string>> config)
    : command_(std::move(command)), config_(std::move(config)) {}

void RunManifest::add_input(const fs::path& path) {
  inputs_.push_back({{"path", fs::absolute(path).string()},
                     {"sha256", sha256_file(path)},
                     {"bytes", fs::file_size(path)}});
}

void RunManifest::add_output(const fs::path& path) {
  outputs_.push_back({{"file", path.filename().string()}, {"sha256", sha256_file(path)}});
}

void RunManifest::add_failure(std::string where, std::string reason) {
  failures_.push_back({{"where", std::move(where)}, {"reason", std::move(reason)}});
}

void RunManifest::add_note(std::string note) { notes_.push_back(std::move(note)); }

std::vector<std::string> RunManifest::argv(const std::string& out) const {
  std::vector<std::string> a{command_};
  for (const auto& [k, v] : config_) {
    if (k == "out" || v.empty()) continue; // unset options keep their defaults
    a.push_back("--" + k + "=" + v);
  }
  a.push_back("--out=" + out);
  return a;
}

void RunManifest::write(const fs::path& dir) const {
  const std::time_t t = std::chrono::system_clock::to_time_t(started_);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();

  Json config = Json::object();
  for (const auto& [k, v] : config_) config[k] = v;
  Json j = {{"tool", "freqconn"},
            {"version", FREQCONN_VERSION},
            {"command", command_},
            {"config", config},
            {"argv", argv(config.value("out", "."))},
            {"seed", seed_ ? Json(*seed_) : Json(nullptr)},
            {"inputs", inputs_},
            {"outputs", outputs_},
            {"started_utc", stamp},
            {"wall_clock_seconds", seconds},
            {"failures", failures_},
            {"notes", notes_}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw ValidationError("cannot write manifest into '" + dir.string() + "'");
  out << j.dump(2) << '\n';
}

Json RunManifest::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open manifest '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw LoadError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

} // namespace freqconn::cli
