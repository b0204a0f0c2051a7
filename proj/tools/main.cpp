// rydjump: command-line front end for the dissipative Rydberg-chain toolkit.
//
// Subcommands:
//   simulate  quantum-jump trajectories -> population/emission tables + manifest
//   rates     closed-form transition rates and slow modes over a scan grid
//   analyze   segmentation, dwell and transition statistics of simulate output
//   oracle    master-equation reference series, steady state, and z-score
//             comparison against a trajectory ensemble
//
// Configuration is resolved preset -> config file -> command-line flags, and
// every output table carries the hash of the fully resolved configuration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "ryd/analysis.hpp"
#include "ryd/basis.hpp"
#include "ryd/config.hpp"
#include "ryd/io.hpp"
#include "ryd/master.hpp"
#include "ryd/rates.hpp"
#include "ryd/trajectory.hpp"

namespace {

using namespace ryd;

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------- options

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::string in_dir;
  std::uint64_t seed = 0;
  int n_jobs = 1;
  double duration = 0.0;
  int n_traj = 0;
  double threshold = 0.0;
  std::string patterns;
};

struct CommonFlags {
  CLI::Option* seed = nullptr;
  CLI::Option* n_jobs = nullptr;
  CLI::Option* duration = nullptr;
  CLI::Option* n_traj = nullptr;
};

CommonFlags add_common(CLI::App* cmd, Options& o) {
  CommonFlags f;
  cmd->add_option("--config", o.config_path, "key=value config file");
  cmd->add_option("--preset", o.preset,
                  "parameter preset: blockade | anti_blockade | equal_drive | rb87");
  cmd->add_option("--out", o.out_dir, "output directory");
  f.seed = cmd->add_option("--seed", o.seed, "master RNG seed");
  f.n_jobs = cmd->add_option("--n-jobs", o.n_jobs, "worker threads");
  f.duration = cmd->add_option("--duration", o.duration, "run length in 1/gamma_e");
  f.n_traj = cmd->add_option("--n-traj", o.n_traj, "number of trajectories");
  return f;
}

// Preset defaults, then config file keys, then explicit flags.
RunConfig resolve_config(const Options& o, const CommonFlags& f) {
  KeyValueMap kv;
  if (!o.config_path.empty()) kv = parse_key_values(read_file(o.config_path));
  if (f.seed->count()) kv["run.seed"] = std::to_string(o.seed);
  if (f.n_jobs->count()) kv["run.n_jobs"] = std::to_string(o.n_jobs);
  if (f.duration->count()) kv["run.duration"] = format_double(o.duration);
  if (f.n_traj->count()) kv["run.n_traj"] = std::to_string(o.n_traj);
  if (o.preset.empty()) return RunConfig::from_map(kv);
  RunConfig cfg = RunConfig::preset(o.preset);
  cfg.apply(kv);
  return cfg;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string traj_name(const char* kind, std::uint64_t stream) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04llu.txt", kind,
                static_cast<unsigned long long>(stream));
  return buf;
}

std::vector<PatternQuery> parse_pattern_list(const std::string& s) {
  std::vector<PatternQuery> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = s.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t gt = item.find('>');
    if (gt == std::string::npos || gt == 0 || gt + 1 == item.size())
      throw std::invalid_argument("pattern must be SOURCE>TARGET: '" + item + "'");
    out.push_back({item.substr(0, gt), item.substr(gt + 1)});
  }
  return out;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Options& o, const CommonFlags& f) {
  RunConfig cfg = resolve_config(o, f);
  cfg.validate();
  const auto records = run_ensemble(cfg.params, cfg.lattice, cfg.duration, cfg.n_traj,
                                    cfg.seed, cfg.n_jobs, cfg.integrator());

  const std::string hash = hash_hex(cfg.config_hash());
  KeyValueMap manifest;
  manifest["version"] = kVersion;
  manifest["config_hash"] = hash;
  manifest["seed"] = std::to_string(cfg.seed);
  for (const auto& [k, v] : cfg.to_map()) manifest["config." + k] = v;

  for (const auto& rec : records) {
    KeyValueMap hdr;
    hdr["config_hash"] = hash;
    hdr["seed"] = std::to_string(rec.seed);
    hdr["stream"] = std::to_string(rec.stream);
    hdr["n_emissions"] = std::to_string(rec.emissions.size());
    hdr["max_norm_increase"] = format_double(rec.max_norm_increase);
    hdr["max_jump_norm_mismatch"] = format_double(rec.max_jump_norm_mismatch);

    const std::string pop_name = traj_name("populations", rec.stream);
    const std::string pop = format_population_table(rec, hdr);
    write_file(join(o.out_dir, pop_name), pop);
    manifest["file." + pop_name] = hash_hex(fnv1a64(pop));

    const std::string emi_name = traj_name("emissions", rec.stream);
    const std::string emi = format_emission_table(rec, hdr);
    write_file(join(o.out_dir, emi_name), emi);
    manifest["file." + emi_name] = hash_hex(fnv1a64(emi));
  }
  write_file(join(o.out_dir, "manifest.txt"), serialize_key_values(manifest));
  std::printf("simulate: %d trajectories x %s time units -> %s\n", cfg.n_traj,
              format_double(cfg.duration).c_str(), o.out_dir.c_str());
  return kExitOk;
}

// ------------------------------------------------------------------- rates

int cmd_rates(const Options& o, const CommonFlags& f) {
  RunConfig cfg = resolve_config(o, f);
  cfg.validate();

  std::vector<double> grid;
  if (cfg.scan_variable.empty()) {
    grid.push_back(cfg.scan_variable == "v_nn" ? cfg.params.v_nn
                                               : cfg.params.delta_r);
  } else if (cfg.scan_variable == "delta_r" || cfg.scan_variable == "v_nn") {
    const auto n = static_cast<std::int64_t>(
        std::floor((cfg.scan_stop - cfg.scan_start) / cfg.scan_step + 1e-9));
    for (std::int64_t k = 0; k <= n; ++k)
      grid.push_back(cfg.scan_start + static_cast<double>(k) * cfg.scan_step);
  } else {
    throw std::invalid_argument("scan.variable must be delta_r or v_nn, got '" +
                                cfg.scan_variable + "'");
  }

  KeyValueMap hdr;
  hdr["config_hash"] = hash_hex(cfg.config_hash());
  hdr["scan_variable"] =
      cfg.scan_variable.empty() ? std::string("delta_r") : cfg.scan_variable;
  hdr["rows"] = std::to_string(grid.size());

  std::string out;
  for (const auto& [k, v] : hdr) out += "# " + k + "=" + v + "\n";
  out +=
      "# columns=value gamma_short d_to_b b_to_d d_to_b_dark_nb b_to_d_dark_nb "
      "ratio_dark_nb dd_to_bb bb_to_dd_bound slow1_re slow1_im branch_p1 "
      "pair_re pair_im branch_p_pair\n";

  for (double v : grid) {
    SystemParams p = cfg.params;
    if (cfg.scan_variable == "v_nn")
      p.v_nn = v;
    else
      p.delta_r = v;
    const LocalRates plain = multi_atom_local_rates(p.delta_r, p.v_nn, p, 0);
    const LocalRates shifted = multi_atom_local_rates(p.delta_r, p.v_nn, p, 1);
    // Collective pair columns assume equal drive amplitudes; zero when the
    // interaction vanishes.
    const double ddbb =
        p.v_nn != 0.0 ? gamma_dd_to_bb(p.omega_r, p.v_nn, p.gamma_e) : 0.0;
    const double bound =
        p.v_nn != 0.0 ? gamma_bb_to_dd_bound(p.omega_r, p.v_nn, p.gamma_e) : 0.0;
    const SlowMode one = perturbative_slow_mode_1atom(p);
    const SlowMode pair = perturbative_slow_mode_2atom(p, p.v_nn);
    const double cols[] = {v,
                           gamma_short(p),
                           plain.dark_to_bright,
                           plain.bright_to_dark,
                           shifted.dark_to_bright,
                           shifted.bright_to_dark,
                           plain.bright_to_dark != 0.0
                               ? shifted.bright_to_dark / plain.bright_to_dark
                               : 0.0,
                           ddbb,
                           bound,
                           one.lambda.real(),
                           one.lambda.imag(),
                           one.p,
                           pair.lambda.real(),
                           pair.lambda.imag(),
                           pair.p};
    for (std::size_t k = 0; k < std::size(cols); ++k) {
      if (k) out += ' ';
      out += format_double(cols[k]);
    }
    out += '\n';
  }
  write_file(join(o.out_dir, "rates.txt"), out);
  std::printf("rates: %zu rows -> %s\n", grid.size(), o.out_dir.c_str());
  return kExitOk;
}

// ----------------------------------------------------------------- analyze

struct Ensemble {
  RunConfig cfg;
  std::vector<PopulationTable> populations;  // indexed by stream
};

// Loads a simulate output directory, verifying the manifest: the config
// echo must reproduce its recorded hash and every listed file must match
// its recorded content hash.
Ensemble load_ensemble(const std::string& dir) {
  const KeyValueMap manifest = parse_key_values(read_file(join(dir, "manifest.txt")));
  if (!manifest.count("config_hash"))
    throw IoError("manifest has no config_hash: " + dir);

  KeyValueMap cfg_kv;
  for (const auto& [k, v] : manifest)
    if (k.rfind("config.", 0) == 0) cfg_kv[k.substr(7)] = v;

  Ensemble ens;
  ens.cfg = RunConfig::from_map(cfg_kv);
  if (hash_hex(ens.cfg.config_hash()) != manifest.at("config_hash"))
    throw IoError("manifest config echo does not reproduce its hash: " + dir);

  for (const auto& [k, expected] : manifest) {
    if (k.rfind("file.", 0) != 0) continue;
    const std::string name = k.substr(5);
    const std::string content = read_file(join(dir, name));
    if (hash_hex(fnv1a64(content)) != expected)
      throw IoError("content hash mismatch for " + name);
    if (name.rfind("populations_", 0) != 0) continue;
    PopulationTable table = parse_population_table(content);
    if (table.header["config_hash"] != manifest.at("config_hash"))
      throw IoError("table " + name + " carries a different config hash");
    if (table.n_atoms != ens.cfg.lattice.n_atoms)
      throw IoError("table " + name + " has the wrong atom count");
    ens.populations.push_back(std::move(table));
  }
  if (ens.populations.empty())
    throw IoError("no population tables in manifest: " + dir);
  return ens;
}

TrajectoryRecord record_from_table(const RunConfig& cfg, const PopulationTable& t) {
  TrajectoryRecord rec;
  rec.params = cfg.params;
  rec.lattice = cfg.lattice;
  rec.integrator = cfg.integrator();
  rec.sample_times = t.times;
  rec.r_pop = t.r_pop;
  rec.duration = t.times.empty() ? 0.0 : t.times.back() - t.times.front();
  return rec;
}

int cmd_analyze(const Options& o) {
  if (o.in_dir.empty()) throw std::invalid_argument("analyze requires --in DIR");
  Ensemble ens = load_ensemble(o.in_dir);
  const double threshold = o.threshold > 0.0 ? o.threshold : ens.cfg.threshold;
  const std::string pattern_spec =
      o.patterns.empty() ? ens.cfg.patterns : o.patterns;
  const std::string hash = hash_hex(ens.cfg.config_hash());

  // Pool completed intervals and pattern counts across trajectories.
  double time_in[2] = {0.0, 0.0};
  std::int64_t exits[2] = {0, 0};
  std::vector<double> dwells[2];
  std::vector<PatternQuery> queries = parse_pattern_list(pattern_spec);
  if (!queries.empty() &&
      static_cast<int>(queries.front().source.size()) > ens.cfg.lattice.n_atoms)
    queries.clear();  // patterns wider than the chain: skip, not an error
  std::vector<PatternStat> pooled(queries.size());

  for (const auto& table : ens.populations) {
    const auto rec = record_from_table(ens.cfg, table);
    const auto seg = classify_periods(rec, threshold);
    for (const auto& ivs : seg.intervals)
      for (std::size_t k = 0; k + 1 < ivs.size(); ++k) {
        const int lab = ivs[k].label == PeriodLabel::dark ? 1 : 0;
        time_in[lab] += ivs[k].length();
        ++exits[lab];
        dwells[lab].push_back(ivs[k].length());
      }
    if (!queries.empty()) {
      const auto stats = estimate_pattern_rates(seg, ens.cfg.lattice, queries);
      for (std::size_t q = 0; q < stats.size(); ++q) {
        pooled[q].source = stats[q].source;
        pooled[q].target = stats[q].target;
        pooled[q].events += stats[q].events;
        pooled[q].time_at_risk += stats[q].time_at_risk;
      }
    }
  }
  if (exits[0] + exits[1] == 0)
    throw std::invalid_argument("analyze: no completed bright/dark interval");

  KeyValueMap hdr;
  hdr["config_hash"] = hash;
  hdr["threshold"] = format_double(threshold);
  hdr["n_trajectories"] = std::to_string(ens.populations.size());

  // Transition-rate table.
  std::string out;
  for (const auto& [k, v] : hdr) out += "# " + k + "=" + v + "\n";
  out += "# columns=transition exits time rate stderr\n";
  const char* names[2] = {"B>D", "D>B"};
  for (int lab = 0; lab < 2; ++lab) {
    const double rate = time_in[lab] > 0.0
                            ? static_cast<double>(exits[lab]) / time_in[lab]
                            : 0.0;
    const double err =
        exits[lab] > 0 ? rate / std::sqrt(static_cast<double>(exits[lab])) : 0.0;
    out += std::string(names[lab]) + " " + std::to_string(exits[lab]) + " " +
           format_double(time_in[lab]) + " " + format_double(rate) + " " +
           format_double(err) + "\n";
  }
  write_file(join(o.out_dir, "analysis_rates.txt"), out);

  // Dwell histograms per label.
  const char* dwell_names[2] = {"analysis_dwell_bright.txt",
                                "analysis_dwell_dark.txt"};
  for (int lab = 0; lab < 2; ++lab) {
    if (dwells[lab].empty()) continue;
    const auto h = dwell_histogram_from_lengths(
        dwells[lab], lab ? PeriodLabel::dark : PeriodLabel::bright, 40);
    KeyValueMap dh = hdr;
    dh["label"] = lab ? "dark" : "bright";
    dh["n_intervals"] = std::to_string(h.n_intervals);
    dh["fit_available"] = h.fit_available ? "1" : "0";
    dh["fit_rate"] = format_double(h.rate);
    dh["fit_rate_stderr"] = format_double(h.rate_stderr);
    dh["chi_square_per_dof"] = format_double(h.chi_square_per_dof);
    dh["poor_fit"] = h.poor_fit ? "1" : "0";
    std::string txt;
    for (const auto& [k, v] : dh) txt += "# " + k + "=" + v + "\n";
    txt += "# columns=bin_lo bin_hi count\n";
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
      txt += format_double(h.edges[b]) + " " + format_double(h.edges[b + 1]) + " " +
             std::to_string(h.counts[b]) + "\n";
    write_file(join(o.out_dir, dwell_names[lab]), txt);
  }

  // Pattern-rate table.
  if (!pooled.empty()) {
    std::string txt;
    for (const auto& [k, v] : hdr) txt += "# " + k + "=" + v + "\n";
    txt += "# columns=source target events time_at_risk rate stderr\n";
    for (auto& st : pooled) {
      st.rate = st.time_at_risk > 0.0
                    ? static_cast<double>(st.events) / st.time_at_risk
                    : 0.0;
      st.rate_stderr = st.time_at_risk > 0.0
                           ? std::sqrt(static_cast<double>(st.events)) /
                                 st.time_at_risk
                           : 0.0;
      txt += st.source + " " + st.target + " " + std::to_string(st.events) + " " +
             format_double(st.time_at_risk) + " " + format_double(st.rate) + " " +
             format_double(st.rate_stderr) + "\n";
    }
    write_file(join(o.out_dir, "analysis_patterns.txt"), txt);
  }
  std::printf("analyze: %zu trajectories, %lld completed intervals -> %s\n",
              ens.populations.size(),
              static_cast<long long>(exits[0] + exits[1]), o.out_dir.c_str());
  return kExitOk;
}

// ------------------------------------------------------------------ oracle

// Splits run.* bookkeeping from the physics: two configs are comparable when
// parameters, lattice, grid and initial state agree.
bool same_physics(const RunConfig& a, const RunConfig& b) {
  const KeyValueMap ma = a.to_map(), mb = b.to_map();
  for (const auto& [k, v] : ma) {
    if (k.rfind("params.", 0) != 0 && k.rfind("lattice.", 0) != 0 &&
        k != "run.duration" && k != "run.sample_interval" && k != "run.initial")
      continue;
    if (mb.at(k) != v) return false;
  }
  return true;
}

int cmd_oracle(const Options& o, const CommonFlags& f) {
  RunConfig cfg = resolve_config(o, f);
  cfg.validate();
  const int n = cfg.lattice.n_atoms;
  const BasisIndex basis(n);
  const auto dim = basis.dim();

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(cfg.initial_state(), cfg.initial_state()) = 1.0;

  const auto n_steps =
      static_cast<std::int64_t>(std::llround(cfg.duration / cfg.sample_interval));
  const auto shelved = [&](const Eigen::MatrixXcd& r, int atom) {
    double s = 0.0;
    for (std::int64_t b = 0; b < dim; ++b)
      if (basis.level(b, atom) == lvl_r) s += r(b, b).real();
    return s;
  };

  KeyValueMap hdr;
  hdr["config_hash"] = hash_hex(cfg.config_hash());
  std::string out;
  for (const auto& [k, v] : hdr) out += "# " + k + "=" + v + "\n";
  out += "# columns=time";
  for (int i = 0; i < n; ++i) out += " r" + std::to_string(i);
  out += " trace_drift min_eigenvalue\n";

  std::vector<std::vector<double>> series(static_cast<std::size_t>(n_steps) + 1);
  double max_drift = 0.0, min_eig = 0.0;
  for (std::int64_t k = 0;; ++k) {
    auto& row = series[static_cast<std::size_t>(k)];
    row.push_back(static_cast<double>(k) * cfg.sample_interval);
    for (int i = 0; i < n; ++i) row.push_back(shelved(rho, i));
    const double drift = std::abs(rho.trace().real() - 1.0) +
                         std::abs(rho.trace().imag());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    row.push_back(drift);
    row.push_back(lo);
    max_drift = std::max(max_drift, drift);
    min_eig = std::min(min_eig, lo);
    if (k == n_steps) break;
    rho = evolve_master(cfg.params, cfg.lattice, rho, cfg.sample_interval);
  }
  for (const auto& row : series) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ' ';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  write_file(join(o.out_dir, "oracle.txt"), out);

  if (n <= kSteadyStateMaxAtoms) {
    const auto ss = steady_state(cfg.params, cfg.lattice);
    std::string txt;
    for (const auto& [k, v] : hdr) txt += "# " + k + "=" + v + "\n";
    txt += "# residual=" + format_double(ss.residual) + "\n";
    txt += "# degenerate=" + std::string(ss.degenerate ? "1" : "0") + "\n";
    txt += "# null_dim=" + std::to_string(ss.null_dim) + "\n";
    txt += "# columns=atom r_steady\n";
    for (int i = 0; i < n; ++i)
      txt += std::to_string(i) + " " + format_double(shelved(ss.rho, i)) + "\n";
    write_file(join(o.out_dir, "oracle_steady.txt"), txt);
  }

  // Optional ensemble comparison: z-score of the trajectory mean against the
  // master-equation value at every sample.
  if (!o.in_dir.empty()) {
    Ensemble ens = load_ensemble(o.in_dir);
    if (!same_physics(cfg, ens.cfg))
      throw IoError("ensemble in " + o.in_dir +
                    " was produced with different physics parameters");
    const auto n_traj = ens.populations.size();
    if (n_traj < 2) throw std::invalid_argument("oracle comparison needs >= 2 trajectories");
    std::string txt;
    for (const auto& [k, v] : hdr) txt += "# " + k + "=" + v + "\n";
    txt += "# n_traj=" + std::to_string(n_traj) + "\n";
    double max_z = 0.0;
    std::string body;
    for (std::size_t k = 0; k < series.size(); ++k) {
      for (int i = 0; i < n; ++i) {
        double mean = 0.0, m2 = 0.0;
        for (const auto& t : ens.populations) {
          const double x = t.r_pop[k * static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(i)];
          mean += x;
          m2 += x * x;
        }
        mean /= static_cast<double>(n_traj);
        const double var =
            std::max(0.0, (m2 - static_cast<double>(n_traj) * mean * mean) /
                              static_cast<double>(n_traj - 1));
        const double se =
            std::sqrt(var / static_cast<double>(n_traj)) + 1e-300;
        const double master = series[k][static_cast<std::size_t>(i) + 1];
        const double z = (mean - master) / se;
        max_z = std::max(max_z, std::abs(z));
        body += format_double(series[k][0]) + " " + std::to_string(i) + " " +
                format_double(mean) + " " + format_double(master) + " " +
                format_double(se) + " " + format_double(z) + "\n";
      }
    }
    txt += "# max_abs_z=" + format_double(max_z) + "\n";
    txt += "# columns=time atom ensemble_mean master stderr z\n";
    txt += body;
    write_file(join(o.out_dir, "oracle_compare.txt"), txt);
    std::printf("oracle: max |z| = %s over %zu samples\n",
                format_double(max_z).c_str(), series.size());
  }
  std::printf("oracle: trace drift %s, min eigenvalue %s -> %s\n",
              format_double(max_drift).c_str(), format_double(min_eig).c_str(),
              o.out_dir.c_str());
  return kExitOk;
}

// -------------------------------------------------------------- entry point

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ResourceCapError& e) {
    std::fprintf(stderr, "error (resource cap): %s\n", e.what());
    return kExitResource;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error (numerical): %s\n", e.what());
    return kExitNumeric;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-jump simulator for a driven dissipative Rydberg chain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Options o;
  auto* sim = app.add_subcommand("simulate", "run trajectories and export tables");
  const CommonFlags sim_f = add_common(sim, o);

  auto* rat = app.add_subcommand("rates", "closed-form rates over a scan grid");
  const CommonFlags rat_f = add_common(rat, o);

  auto* ana = app.add_subcommand("analyze", "bright/dark statistics of a run");
  const CommonFlags ana_f = add_common(ana, o);
  (void)ana_f;
  ana->add_option("--in", o.in_dir, "simulate output directory");
  ana->add_option("--threshold", o.threshold, "dark classification cut");
  ana->add_option("--patterns", o.patterns, "comma list of SOURCE>TARGET windows");

  auto* ora = app.add_subcommand("oracle", "master-equation reference data");
  const CommonFlags ora_f = add_common(ora, o);
  ora->add_option("--in", o.in_dir, "ensemble directory to compare against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (sim->parsed()) return guarded([&] { return cmd_simulate(o, sim_f); });
  if (rat->parsed()) return guarded([&] { return cmd_rates(o, rat_f); });
  if (ana->parsed()) return guarded([&] { return cmd_analyze(o); });
  if (ora->parsed()) return guarded([&] { return cmd_oracle(o, ora_f); });
  return kExitConfig;
}
