#include "ryd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ryd/basis.hpp"
#include "ryd/config.hpp"

namespace ryd {

// ----------------------------------------------------------------- numbers

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v{};
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v{};
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v{};
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("not an unsigned integer: '" + s + "'");
  return v;
}

// ------------------------------------------------------------------ hashing

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------- flat key=value

KeyValueMap parse_key_values(const std::string& text) {
  KeyValueMap kv;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (kv.count(key))
      throw std::invalid_argument("duplicate key '" + key + "'");
    kv.emplace(std::move(key), std::move(value));
    if (pos > text.size()) break;
  }
  return kv;
}

std::string serialize_key_values(const KeyValueMap& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

// -------------------------------------------------------------------- files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory: " + parent.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

// ------------------------------------------------------------------- tables

namespace {

std::string header_block(const KeyValueMap& header) {
  std::string out;
  for (const auto& [k, v] : header) {
    out += "# ";
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t sp = line.find(' ', pos);
    if (sp == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    if (sp > pos) out.push_back(line.substr(pos, sp - pos));
    pos = sp + 1;
  }
  return out;
}

// Shared scaffold: collects '# k=v' headers and passes data rows to `row`.
template <typename RowFn>
KeyValueMap parse_table(const std::string& text, RowFn&& row) {
  KeyValueMap header;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const std::size_t eq = body.find('=');
      if (eq != std::string::npos && eq > 0)
        header[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    row(split_fields(line), line_no);
  }
  return header;
}

}  // namespace

std::string format_population_table(const TrajectoryRecord& rec,
                                    const KeyValueMap& header) {
  std::string out = header_block(header);
  out += "# columns=time";
  for (int i = 0; i < rec.n_atoms(); ++i) {
    out += " r";
    out += std::to_string(i);
  }
  out += '\n';
  for (std::size_t k = 0; k < rec.n_samples(); ++k) {
    out += format_double(rec.sample_times[k]);
    for (int i = 0; i < rec.n_atoms(); ++i) {
      out += ' ';
      out += format_double(rec.r_at(k, i));
    }
    out += '\n';
  }
  return out;
}

std::string format_emission_table(const TrajectoryRecord& rec,
                                  const KeyValueMap& header) {
  std::string out = header_block(header);
  out += "# columns=time atom channel\n";
  for (const auto& e : rec.emissions) {
    out += format_double(e.time);
    out += ' ';
    out += std::to_string(e.atom);
    out += ' ';
    out += e.channel == JumpChannel::e_decay ? 'e' : 'r';
    out += '\n';
  }
  return out;
}

PopulationTable parse_population_table(const std::string& text) {
  PopulationTable table;
  table.header = parse_table(text, [&](const std::vector<std::string>& f, int line) {
    if (f.size() < 2)
      throw IoError("population row " + std::to_string(line) + ": too few columns");
    const int atoms = static_cast<int>(f.size()) - 1;
    if (table.n_atoms == 0)
      table.n_atoms = atoms;
    else if (atoms != table.n_atoms)
      throw IoError("population row " + std::to_string(line) + ": ragged columns");
    table.times.push_back(parse_double(f[0]));
    for (int i = 0; i < atoms; ++i)
      table.r_pop.push_back(parse_double(f[static_cast<std::size_t>(i) + 1]));
  });
  return table;
}

EmissionTable parse_emission_table(const std::string& text) {
  EmissionTable table;
  table.header = parse_table(text, [&](const std::vector<std::string>& f, int line) {
    if (f.size() != 3)
      throw IoError("emission row " + std::to_string(line) + ": expected 3 columns");
    EmissionEvent e;
    e.time = parse_double(f[0]);
    e.atom = static_cast<int>(parse_int(f[1]));
    if (f[2] == "e")
      e.channel = JumpChannel::e_decay;
    else if (f[2] == "r")
      e.channel = JumpChannel::r_decay;
    else
      throw IoError("emission row " + std::to_string(line) + ": unknown channel '" +
                    f[2] + "'");
    table.emissions.push_back(e);
  });
  return table;
}

// =========================================================== run configuration

namespace {

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("lattice.boundary must be 'periodic' or 'open', got '" +
                              s + "'");
}

std::string boundary_name(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

int auto_cutoff(int n_atoms) { return std::min(3, n_atoms / 2); }

}  // namespace

RunConfig RunConfig::preset(const std::string& name) {
  RunConfig c;
  c.params.omega_e = 0.2;
  c.params.omega_r = 0.005;
  c.params.delta_r = 0.0;
  c.params.v_nn = 0.1;
  if (name == "blockade") {
    // base values above
  } else if (name == "anti_blockade") {
    c.params.delta_r = 0.1;
  } else if (name == "equal_drive") {
    c.params.omega_e = 0.1;
    c.params.omega_r = 0.1;
    c.params.v_nn = 0.4;
  } else if (name == "rb87") {
    c.params.v_nn = 0.2;
    c.params.gamma_r = 1e-4;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  c.lattice.cutoff = auto_cutoff(c.lattice.n_atoms);
  return c;
}

void RunConfig::apply(const KeyValueMap& kv) {
  bool cutoff_explicit = kv.count("lattice.cutoff") > 0;
  for (const auto& [key, value] : kv) {
    if (key == "params.omega_e")
      params.omega_e = parse_double(value);
    else if (key == "params.omega_r")
      params.omega_r = parse_double(value);
    else if (key == "params.delta_e")
      params.delta_e = parse_double(value);
    else if (key == "params.delta_r")
      params.delta_r = parse_double(value);
    else if (key == "params.gamma_e")
      params.gamma_e = parse_double(value);
    else if (key == "params.gamma_r")
      params.gamma_r = parse_double(value);
    else if (key == "params.v_nn")
      params.v_nn = parse_double(value);
    else if (key == "lattice.n_atoms")
      lattice.n_atoms = static_cast<int>(parse_int(value));
    else if (key == "lattice.boundary")
      lattice.boundary = parse_boundary(value);
    else if (key == "lattice.exponent")
      lattice.exponent = static_cast<int>(parse_int(value));
    else if (key == "lattice.cutoff")
      lattice.cutoff = static_cast<int>(parse_int(value));
    else if (key == "run.duration")
      duration = parse_double(value);
    else if (key == "run.sample_interval")
      sample_interval = parse_double(value);
    else if (key == "run.dt_min")
      dt_min = parse_double(value);
    else if (key == "run.initial")
      initial = value;
    else if (key == "run.n_traj")
      n_traj = static_cast<int>(parse_int(value));
    else if (key == "run.seed")
      seed = parse_uint(value);
    else if (key == "run.n_jobs")
      n_jobs = static_cast<int>(parse_int(value));
    else if (key == "analyze.threshold")
      threshold = parse_double(value);
    else if (key == "analyze.patterns")
      patterns = value;
    else if (key == "scan.variable")
      scan_variable = value;
    else if (key == "scan.start")
      scan_start = parse_double(value);
    else if (key == "scan.stop")
      scan_stop = parse_double(value);
    else if (key == "scan.step")
      scan_step = parse_double(value);
    else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }
  // The interaction cutoff follows the chain size unless set explicitly.
  if (kv.count("lattice.n_atoms") && !cutoff_explicit)
    lattice.cutoff = auto_cutoff(lattice.n_atoms);
}

RunConfig RunConfig::from_map(const KeyValueMap& kv) {
  RunConfig c;
  c.lattice.cutoff = auto_cutoff(c.lattice.n_atoms);
  c.apply(kv);
  return c;
}

KeyValueMap RunConfig::to_map() const {
  KeyValueMap kv;
  kv["params.omega_e"] = format_double(params.omega_e);
  kv["params.omega_r"] = format_double(params.omega_r);
  kv["params.delta_e"] = format_double(params.delta_e);
  kv["params.delta_r"] = format_double(params.delta_r);
  kv["params.gamma_e"] = format_double(params.gamma_e);
  kv["params.gamma_r"] = format_double(params.gamma_r);
  kv["params.v_nn"] = format_double(params.v_nn);
  kv["lattice.n_atoms"] = std::to_string(lattice.n_atoms);
  kv["lattice.boundary"] = boundary_name(lattice.boundary);
  kv["lattice.exponent"] = std::to_string(lattice.exponent);
  kv["lattice.cutoff"] = std::to_string(lattice.cutoff);
  kv["run.duration"] = format_double(duration);
  kv["run.sample_interval"] = format_double(sample_interval);
  kv["run.dt_min"] = format_double(dt_min);
  kv["run.initial"] = initial;
  kv["run.n_traj"] = std::to_string(n_traj);
  kv["run.seed"] = std::to_string(seed);
  // run.n_jobs is accepted as input but never echoed: worker count must not
  // change any output byte, so it cannot enter the config hash.
  kv["analyze.threshold"] = format_double(threshold);
  kv["analyze.patterns"] = patterns;
  kv["scan.variable"] = scan_variable;
  kv["scan.start"] = format_double(scan_start);
  kv["scan.stop"] = format_double(scan_stop);
  kv["scan.step"] = format_double(scan_step);
  return kv;
}

std::uint64_t RunConfig::config_hash() const {
  return fnv1a64(serialize_key_values(to_map()));
}

void RunConfig::validate() const {
  params.validate();
  lattice.validate();
  if (!(duration > 0.0)) throw std::invalid_argument("run.duration must be > 0");
  if (!(sample_interval > 0.0))
    throw std::invalid_argument("run.sample_interval must be > 0");
  if (!(dt_min > 0.0) || dt_min > sample_interval)
    throw std::invalid_argument("run.dt_min must be in (0, run.sample_interval]");
  if (n_traj < 1) throw std::invalid_argument("run.n_traj must be >= 1");
  if (n_jobs < 1) throw std::invalid_argument("run.n_jobs must be >= 1");
  if (!(threshold > 0.0) || !(threshold < 1.0))
    throw std::invalid_argument("analyze.threshold must be in (0, 1)");
  if (!initial.empty()) {
    if (static_cast<int>(initial.size()) != lattice.n_atoms)
      throw std::invalid_argument("run.initial must have one letter per atom");
    for (char ch : initial)
      if (ch != 'g' && ch != 'e' && ch != 'r')
        throw std::invalid_argument("run.initial letters must be g, e or r");
  }
  if (!scan_variable.empty()) {
    if (!(scan_step > 0.0)) throw std::invalid_argument("scan.step must be > 0");
    if (scan_stop < scan_start)
      throw std::invalid_argument("scan.stop must be >= scan.start");
  }
}

std::int64_t RunConfig::initial_state() const {
  if (initial.empty()) return 0;
  const BasisIndex basis(lattice.n_atoms);
  std::vector<int> levels(initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i)
    levels[i] = initial[i] == 'g' ? lvl_g : (initial[i] == 'e' ? lvl_e : lvl_r);
  return basis.pack(levels);
}

IntegratorOptions RunConfig::integrator() const {
  IntegratorOptions opts;
  opts.sample_interval = sample_interval;
  opts.dt_min = dt_min;
  opts.initial_state = initial_state();
  return opts;
}

}  // namespace ryd
