#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prefcheck::io {

// Whole-file read. Throws IoError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by an atomic
// rename, so readers never observe a partial file and a failed run never
// leaves a truncated artifact behind.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Splits text into lines, dropping a trailing empty line. Keeps interior
// empty lines so line numbers in diagnostics match the input.
std::vector<std::string> split_lines(std::string_view text);

// Provenance sidecar written next to every CLI output. Holds the tool
// version, the invocation, and content hashes of all inputs and of the
// output itself; no timestamps, so reruns produce identical manifests.
struct Manifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> args;    // flag, value
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::optional<std::uint64_t> seed;
};

// Writes `content` to `path` atomically plus `<path>.manifest.json`.
void write_with_manifest(const std::filesystem::path& path,
                         std::string_view content, const Manifest& manifest);

// Shortest round-trip decimal form of a double (what the JSON serializer
// emits); used wherever a weight or reward appears in a text artifact so
// that equal values always print identically.
std::string format_double(double value);

}  // namespace prefcheck::io
