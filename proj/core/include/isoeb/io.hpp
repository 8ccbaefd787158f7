#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isoeb/sequence.hpp"

namespace isoeb {

/// Header-row CSV of doubles. Extra columns are carried along untouched;
/// malformed cells are rejected with their 1-based line number.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
  /// Column values; throws if the column is missing.
  std::vector<double> require(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, const std::string& origin = "csv");
CsvTable read_csv_file(const std::string& path);
void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

/// (index, theta, y) rows; theta column present only when the truth is.
std::string problem_to_csv(const SequenceProblem& problem);
SequenceProblem problem_from_csv(const CsvTable& table, double sigma2,
                                 double n_effective);

std::string problem_to_json(const SequenceProblem& problem,
                            std::optional<std::uint64_t> seed = {});
SequenceProblem problem_from_json(const std::string& text);

/// Record of a CLI run, written alongside every output. Re-running the same
/// manifest reproduces the outputs byte for byte (timestamp excluded).
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // path -> fnv1a
  std::string version;
  std::string timestamp;  // ISO-8601, informational only
};

std::string manifest_to_json(const RunManifest& manifest);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Minimal SVG polyline chart for plot-ready output; one series per row set.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string render_svg_chart(const std::vector<SvgSeries>& series,
                             const std::string& x_label,
                             const std::string& y_label, bool log_log = false);

}  // namespace isoeb
