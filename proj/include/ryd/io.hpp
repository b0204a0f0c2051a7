#pragma once
// Plain-text, byte-exact serialization: shortest round-trip number formatting,
// flat key=value blocks, content hashing, and the table formats the CLI
// writes (population time series, emission logs, run manifests).

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ryd/trajectory.hpp"

namespace ryd {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------- numbers

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// Strict full-string parses; throw std::invalid_argument on trailing garbage.
double parse_double(const std::string& s);
std::int64_t parse_int(const std::string& s);
std::uint64_t parse_uint(const std::string& s);

// ------------------------------------------------------------------ hashing

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);  // 16 lowercase hex digits

// ---------------------------------------------------------- flat key=value

// Lines of 'key=value'; blank lines and '#' comment lines are skipped; keys
// must be unique.  Serialization is sorted so a map has one canonical form.
using KeyValueMap = std::map<std::string, std::string>;
KeyValueMap parse_key_values(const std::string& text);
std::string serialize_key_values(const KeyValueMap& kv);

// -------------------------------------------------------------------- files

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// ------------------------------------------------------------------- tables

// Tables are '# key=value' header lines, one '# columns=...' line, then
// space-separated rows with shortest round-trip numbers.

std::string format_population_table(const TrajectoryRecord& rec,
                                    const KeyValueMap& header);
std::string format_emission_table(const TrajectoryRecord& rec,
                                  const KeyValueMap& header);

struct PopulationTable {
  KeyValueMap header;
  int n_atoms = 0;
  std::vector<double> times;
  std::vector<double> r_pop;  // row-major [sample][atom]
};
PopulationTable parse_population_table(const std::string& text);

struct EmissionTable {
  KeyValueMap header;
  std::vector<EmissionEvent> emissions;
};
EmissionTable parse_emission_table(const std::string& text);

}  // namespace ryd
