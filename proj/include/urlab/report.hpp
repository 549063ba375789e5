#pragma once

// Result emission: CSV (comma, LF, header row), JSON (UTF-8, stable key
// order), pass/fail comparisons and the run manifest.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "urlab/brownian.hpp"
#include "urlab/monte_carlo.hpp"

namespace urlab {

using Json = nlohmann::ordered_json;

/// One estimate compared with its target.
struct Check {
  std::string name;
  double target = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// |estimate - target| <= max(floor, se_multiplier * se).
Check within(std::string name, double estimate, double se, double target, double floor, double se_multiplier);

/// Explicit predicate check (bounds, signs, orderings).
Check predicate(std::string name, double estimate, double se, double target, double tolerance, bool pass,
                std::string note);

Json to_json(const Check& c);
Json to_json(const McSummary& s);
Json to_json(const NamedEstimate& e);

void write_summary_csv(std::ostream& os, std::span<const McSummary> rows);
void print_check_table(std::ostream& os, std::span<const Check> checks);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Output directory plus the list of files written into it.
class ArtifactSink {
 public:
  explicit ArtifactSink(std::filesystem::path dir);

  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const Json& doc);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

  /// {file, sha256} for every artifact, in write order.
  Json checksums() const;

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

/// Formats a double with round-trip precision.
std::string format_double(double v);

}  // namespace urlab
