#pragma once

// Scenario runs and their reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "micromorph/scenario.hpp"

namespace micromorph {

enum class Command { kCheckEl, kCheckBalance, kIntegrals, kConvergence };
enum class Format { kTable, kCsv, kJson };

const char* name_of(Command c);
const char* name_of(Format f);
std::optional<Command> parse_command(std::string_view text);
std::optional<Format> parse_format(std::string_view text);

struct RunConfig {
  std::string scenario = "a";  // builtin name or file path
  std::vector<Command> commands{Command::kCheckEl, Command::kCheckBalance, Command::kIntegrals,
                                Command::kConvergence};
  std::string out;  // empty: standard output
  Format format = Format::kTable;
  std::size_t points = 100;
  std::uint64_t seed = 1;
  std::optional<int> surface_order;
  std::optional<int> volume_order;
  bool energy_without_sources = false;
  int threads = 0;
};

/// One checked (or informational) quantity.
///
/// `value` is what is compared with `tolerance`: kAtMost rows pass when
/// value <= tolerance, kAtLeast rows when value >= tolerance. Surface and
/// volume columns are filled for integral rows only.
struct ReportRow {
  enum class Kind { kAtMost, kAtLeast, kInfo };

  std::string quantity;
  std::string component;
  std::optional<double> surface;
  std::optional<double> volume;
  double value = 0.0;
  double tolerance = 0.0;
  Kind kind = Kind::kInfo;

  bool pass() const;
};

struct Report {
  std::string scenario;
  std::string description;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  int surface_order = 0;
  int volume_order = 0;
  std::string geometry;
  bool energy_without_sources = false;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;

  bool passed() const;
  std::vector<const ReportRow*> failures() const;
};

Report run_scenario(const Scenario& scenario, const RunConfig& config);

std::string format_report(const Report& report, Format format);

/// Resolves the scenario, runs it, and writes the report. Returns the exit
/// status: 0 all checks pass, 1 some tolerance failed, 2 the scenario could
/// not be parsed (nothing is written to the report destination).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses and checks a scenario without running it. Returns 0 or 2.
int validate(const std::string& scenario, std::ostream& out, std::ostream& err);

/// printf("%.17g").
std::string format_number(double v);

}  // namespace micromorph
