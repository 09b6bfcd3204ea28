#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmetro::cli {

/// Bad flags, config entries or state specs; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested point could not be computed within the truncation tolerances; exit code 3.
class PointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EtaGrid {
  double min = 0.01;
  double max = 1.0;
  int count = 101;

  std::vector<double> values() const;
  std::string to_string() const;
};

/// MIN:MAX:COUNT
EtaGrid parse_eta_grid(std::string_view text);

struct RunConfig {
  std::string command;
  std::optional<std::string> states;
  std::optional<EtaGrid> eta;
  double rphi = 400.0;
  std::optional<double> alpha;
  std::optional<double> alpha_bal;
  double alpha_bal_max = 5.0;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  int trials = 200;
  long m = 10000;
  std::string out = "-";
};

/// Checks every parameter the command will use and throws UsageError
/// before any computation starts.
void validate(const RunConfig& config);

/// Full CSV text of a command; deterministic in `config`.
std::string run(const RunConfig& config);

/// argv front end: parses flags and the optional key=value config file,
/// runs the command, writes the CSV and returns the process exit code.
int main_entry(int argc, const char* const* argv);

}  // namespace qmetro::cli
