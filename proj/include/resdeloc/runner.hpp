#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "resdeloc/config.hpp"
#include "resdeloc/resolvent.hpp"

namespace resdeloc {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// 17 significant digits, locale independent.
std::string format_double(double v);

/// Writes to a sibling temp file; the target only appears on commit().
/// Destroying an uncommitted file removes the temp file.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile();

  void write(std::string_view text);
  void commit();
  const std::filesystem::path& target() const { return target_; }
  const std::filesystem::path& temp() const { return temp_; }

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

class CsvWriter {
 public:
  CsvWriter(AtomicFile& file, std::vector<std::string> columns);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(const char* v) { return cell(std::string(v)); }
  void end_row();

 private:
  AtomicFile& file_;
  std::size_t columns_;
  std::string line_;
  std::size_t filled_ = 0;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// Test seam forwarded to the resonance kernels.
  std::function<cplx(cplx)> g_filter;
};

struct RunResult {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> warnings;
  nlohmann::json manifest;
};

/// Executes one command and writes <command>.csv, <command>.summary.json and
/// manifest.json (last). Exit codes: 0 ok, 1 config, 2 integrity, 3 I/O.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// Reference values shared with the plotting side.
nlohmann::json reference_values(const RunConfig& config);

}  // namespace resdeloc
