#include "isoeb/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "isoeb/stats.hpp"

namespace isoeb {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (std::string& s : parts) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return parts;
}

double parse_double(const std::string& cell, const std::string& origin,
                    std::size_t line_no, const std::string& col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                             ": malformed number '" + cell + "' in column '" +
                             col + "'");
  return value;
}

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::require(const std::string& name) const {
  const auto idx = column(name);
  if (!idx) throw std::runtime_error("csv: missing required column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[*idx]);
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> parts = split_line(line);
    if (table.header.empty()) {
      table.header = parts;
      if (table.header.empty() || table.header[0].empty())
        throw std::runtime_error(origin + ":1: header row required");
      continue;
    }
    if (parts.size() != table.header.size())
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected " +
                               std::to_string(table.header.size()) +
                               " fields, got " + std::to_string(parts.size()));
    std::vector<double> row(parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j)
      row[j] = parse_double(parts[j], origin, line_no, table.header[j]);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw std::runtime_error(origin + ":1: header row required");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  return parse_csv(read_file(path), path);
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << fmt17(row[j]);
    out << '\n';
  }
  return out.str();
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  write_file(path, format_csv(header, rows));
}

std::string problem_to_csv(const SequenceProblem& problem) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  const bool with_truth = problem.truth.has_value();
  header = with_truth ? std::vector<std::string>{"index", "theta", "y"}
                      : std::vector<std::string>{"index", "y"};
  for (std::size_t i = 0; i < problem.dim(); ++i) {
    if (with_truth)
      rows.push_back({static_cast<double>(i + 1), (*problem.truth)[i],
                      problem.y[i]});
    else
      rows.push_back({static_cast<double>(i + 1), problem.y[i]});
  }
  return format_csv(header, rows);
}

SequenceProblem problem_from_csv(const CsvTable& table, double sigma2,
                                 double n_effective) {
  SequenceProblem problem;
  problem.y = table.require("y");
  problem.sigma2 = sigma2;
  problem.n_effective = n_effective;
  problem.noise_var = sigma2 / n_effective;
  if (table.column("theta")) problem.truth = table.require("theta");
  if (problem.truth && problem.truth->size() != problem.y.size())
    throw std::runtime_error("csv: theta/y length mismatch");
  return problem;
}

std::string problem_to_json(const SequenceProblem& problem,
                            std::optional<std::uint64_t> seed) {
  nlohmann::ordered_json j;
  j["p"] = problem.dim();
  j["sigma2"] = problem.sigma2;
  j["n_effective"] = problem.n_effective;
  j["noise_var"] = problem.noise_var;
  if (seed) j["seed"] = *seed;
  j["y"] = problem.y;
  if (problem.truth) j["theta"] = *problem.truth;
  return j.dump(2) + "\n";
}

SequenceProblem problem_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SequenceProblem problem;
  problem.y = j.at("y").get<std::vector<double>>();
  problem.sigma2 = j.at("sigma2").get<double>();
  problem.n_effective = j.at("n_effective").get<double>();
  problem.noise_var = j.value("noise_var", problem.sigma2 / problem.n_effective);
  if (j.contains("theta"))
    problem.truth = j.at("theta").get<std::vector<double>>();
  return problem;
}

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["subcommand"] = manifest.subcommand;
  j["flags"] = manifest.flags;
  j["seed"] = manifest.seed;
  j["input_digests"] = manifest.input_digests;
  j["version"] = manifest.version;
  j["timestamp"] = manifest.timestamp;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

std::string render_svg_chart(const std::vector<SvgSeries>& series,
                             const std::string& x_label,
                             const std::string& y_label, bool log_log) {
  const int width = 640, height = 420, margin = 56;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto tx = [&](double v) { return log_log ? std::log10(v) : v; };
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, tx(s.y[i]));
      ymax = std::max(ymax, tx(s.y[i]));
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  auto px = [&](double v) {
    return margin + (tx(v) - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double v) {
    return height - margin -
           (tx(v) - ymin) / (ymax - ymin) * (height - 2 * margin);
  };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
      << width - margin << "' y2='" << height - margin
      << "' stroke='black'/>\n";
  svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
      << "' y2='" << height - margin << "' stroke='black'/>\n";
  svg << "<text x='" << width / 2 << "' y='" << height - 12
      << "' text-anchor='middle' font-size='13'>" << x_label
      << (log_log ? " (log10)" : "") << "</text>\n";
  svg << "<text x='16' y='" << height / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
      << height / 2 << ")'>" << y_label << (log_log ? " (log10)" : "")
      << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const SvgSeries& s = series[k];
    svg << "<polyline fill='none' stroke='" << colors[k % 6]
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    svg << "'/>\n";
    svg << "<text x='" << width - margin + 4 << "' y='"
        << margin + 16 * static_cast<int>(k) << "' font-size='11' fill='"
        << colors[k % 6] << "'>" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace isoeb
