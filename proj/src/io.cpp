#include "prefcheck/io.hpp"

#include <json.hpp>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "prefcheck/digest.hpp"
#include "prefcheck/errors.hpp"
#include "prefcheck/version.hpp"

namespace prefcheck::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "': " +
                  std::strerror(errno));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(buf).str();
}

void atomic_write(const std::filesystem::path& path,
                  std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : ".";
  std::error_code ec;
  fs::create_directories(dir, ec);

  fs::path tmp = dir / (path.filename().string() + ".tmp." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot create '" + tmp.string() + "': " +
                    std::strerror(errno));
    }
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) {
      std::error_code rm;
      fs::remove(tmp, rm);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code rm;
    fs::remove(tmp, rm);
    throw IoError("rename to '" + path.string() + "' failed: " + ec.message());
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

void write_with_manifest(const std::filesystem::path& path,
                         std::string_view content, const Manifest& manifest) {
  atomic_write(path, content);

  nlohmann::ordered_json doc;
  doc["tool"] = "prefcheck";
  doc["version"] = kVersion;
  doc["subcommand"] = manifest.subcommand;
  nlohmann::ordered_json args = nlohmann::ordered_json::object();
  for (const auto& [flag, value] : manifest.args) args[flag] = value;
  doc["args"] = std::move(args);
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [in_path, hash] : manifest.inputs) inputs[in_path] = hash;
  doc["inputs"] = std::move(inputs);
  if (manifest.seed) doc["seed"] = *manifest.seed;
  // Filename only: two runs into different directories must produce
  // byte-identical manifests.
  doc["output"] = path.filename().string();
  doc["sha256"] = sha256_hex(content);

  atomic_write(path.string() + ".manifest.json", doc.dump(2) + "\n");
}

std::string format_double(double value) {
  return nlohmann::json(value).dump();
}

}  // namespace prefcheck::io
