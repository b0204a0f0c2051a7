#pragma once
// Run configuration for the CLI: flat dotted keys, named parameter presets,
// layered resolution (preset -> config file -> command-line overrides), and
// the process exit-code contract.

#include <cstdint>
#include <string>

#include "ryd/io.hpp"
#include "ryd/params.hpp"
#include "ryd/trajectory.hpp"

namespace ryd {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;    // invalid config / arguments
inline constexpr int kExitResource = 3;  // problem size beyond hard caps
inline constexpr int kExitNumeric = 4;   // numerical routine failed
inline constexpr int kExitIo = 5;        // file/manifest errors

struct RunConfig {
  SystemParams params;
  LatticeSpec lattice;
  double duration = 1000.0;
  double sample_interval = 1.0;
  double dt_min = 1e-4;
  std::string initial;  // one of g/e/r per atom; empty means all ground
  int n_traj = 1;
  std::uint64_t seed = 0;
  int n_jobs = 1;
  double threshold = 0.98;  // dark classification cut
  std::string patterns = "DBB>DDB,DDB>DBB,DBD>DDD";
  std::string scan_variable;  // e.g. "delta_r" or "v_nn" for rate scans
  double scan_start = 0.0;
  double scan_stop = 0.0;
  double scan_step = 0.0;

  // Named parameter bundles; throws std::invalid_argument on unknown names.
  //   blockade:      weak shelving drive on resonance, interaction pushes a
  //                  neighbour's shelf off resonance (single-atom jump regime)
  //   anti_blockade: same drives with delta_r = v_nn, so one dark neighbour
  //                  brings the shelf onto resonance
  //   equal_drive:   both drives equal and resonant, strong interaction;
  //                  jumps are collective
  //   rb87:          blockade values with alkali-like shelf decay, v_nn = 0.2
  static RunConfig preset(const std::string& name);

  // Applies key=value overrides; unknown keys throw std::invalid_argument.
  void apply(const KeyValueMap& kv);
  static RunConfig from_map(const KeyValueMap& kv);

  // Full resolved echo with canonical key order, and its content hash.
  KeyValueMap to_map() const;
  std::uint64_t config_hash() const;

  // Derived pieces for the engine; validate() must pass first.
  void validate() const;  // params, lattice, run block, initial string
  std::int64_t initial_state() const;
  IntegratorOptions integrator() const;
};

}  // namespace ryd
