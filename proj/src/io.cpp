#include "smectic/io.hpp"

#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smectic/error.hpp"
#include "smectic/qtensor.hpp"

namespace smectic {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
  fail(ErrorKind::Io, path.string() + ": " + what);
}

std::string errno_text() { return std::strerror(errno); }

const char* q_component_name(int dim, int c) {
  static const char* const names2[] = {"q11", "q12"};
  static const char* const names3[] = {"q11", "q22", "q12", "q13", "q23"};
  return dim == 2 ? names2[c] : names3[c];
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0x00000000000000ffULL) << 56) | ((v & 0x000000000000ff00ULL) << 40) |
        ((v & 0x0000000000ff0000ULL) << 24) | ((v & 0x00000000ff000000ULL) << 8) |
        ((v & 0x000000ff00000000ULL) >> 8) | ((v & 0x0000ff0000000000ULL) >> 24) |
        ((v & 0x00ff000000000000ULL) >> 40) | ((v & 0xff00000000000000ULL) >> 56);
  }
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Diagnostics

DiagnosticsRecord make_record(const SolverState& state, const StepDiagnostics& d) {
  DiagnosticsRecord r;
  r.step = state.step_index;
  r.t = state.t;
  r.tau = d.tau_used;
  r.sup_F_Q = d.sup_F;
  r.max_u = d.max_u;
  r.min_u = d.min_u;
  r.E_modified = d.E_modified;
  r.E_original = d.E_original;
  r.e1h = d.e1h;
  r.s = d.s;
  r.g = d.g;
  r.xi = d.xi;
  r.R = d.R;
  return r;
}

std::string format_record(const DiagnosticsRecord& r) {
  std::string line = std::to_string(r.step);
  for (double v : {r.t, r.tau, r.sup_F_Q, r.max_u, r.min_u, r.E_modified, r.E_original, r.e1h, r.s, r.g,
                   r.xi, r.R}) {
    line += ',';
    line += fmt17(v);
  }
  return line;
}

void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const fs::path& path) {
  std::string text = std::string(kDiagnosticsHeader) + "\n";
  for (const auto& r : records) text += format_record(r) + "\n";
  write_text(path, text);
}

std::vector<DiagnosticsRecord> read_diagnostics(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsHeader) io_error(path, "unexpected diagnostics header");
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 13) io_error(path, "malformed row: " + line);
    DiagnosticsRecord r;
    r.step = std::stol(cells[0]);
    double* fields[] = {&r.t,          &r.tau,        &r.sup_F_Q, &r.max_u, &r.min_u, &r.E_modified,
                        &r.E_original, &r.e1h,        &r.s,       &r.g,     &r.xi,    &r.R};
    for (int i = 0; i < 12; ++i) *fields[i] = std::strtod(cells[i + 1].c_str(), nullptr);
    out.push_back(r);
  }
  return out;
}

DiagnosticsWriter::DiagnosticsWriter(const fs::path& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "w");
  if (!file_) io_error(path, errno_text());
  std::fprintf(file_, "%s\n", kDiagnosticsHeader);
}

DiagnosticsWriter::~DiagnosticsWriter() {
  if (file_) std::fclose(file_);
}

void DiagnosticsWriter::on_step(const SolverState& state, const StepDiagnostics& diag) {
  const std::string line = format_record(make_record(state, diag));
  if (std::fprintf(file_, "%s\n", line.c_str()) < 0) io_error(path_, "write failed");
  ++rows_;
}

// ---------------------------------------------------------------------------
// Snapshots

const std::vector<double>& Snapshot::field(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return fields[i];
  }
  fail(ErrorKind::Argument, "snapshot has no field '" + name + "'");
}

Snapshot make_snapshot(const SolverState& state) {
  Snapshot snap;
  snap.grid = state.u.grid();
  snap.time = state.t;
  snap.s = state.s;
  snap.step = state.step_index;
  snap.names.push_back("u");
  snap.fields.emplace_back(state.u.values().begin(), state.u.values().end());
  for (int c = 0; c < state.Q.count(); ++c) {
    snap.names.push_back(q_component_name(snap.grid.dim, c));
    const auto v = state.Q.component(c).values();
    snap.fields.emplace_back(v.begin(), v.end());
  }
  const ScalarField lam = largest_eigenvalue(state.Q);
  snap.names.push_back("lambda_max");
  snap.fields.emplace_back(lam.values().begin(), lam.values().end());
  return snap;
}

SolverState state_from_snapshot(const Snapshot& snap) {
  SolverState st;
  st.u = ScalarField(snap.grid, snap.field("u"));
  st.Q = QField(snap.grid);
  for (int c = 0; c < st.Q.count(); ++c) {
    st.Q.component(c) = ScalarField(snap.grid, snap.field(q_component_name(snap.grid.dim, c)));
  }
  st.s = snap.s;
  st.t = snap.time;
  st.step_index = snap.step;
  return st;
}

void write_snapshot(const Snapshot& snap, const fs::path& stem) {
  const std::size_t n = snap.grid.size();
  fs::path bin = stem;
  bin += ".bin";
  fs::path hdr = stem;
  hdr += ".hdr";
  {
    std::ofstream out(bin, std::ios::binary | std::ios::trunc);
    if (!out) io_error(bin, "cannot open for writing");
    std::vector<std::uint64_t> words(n);
    for (const auto& f : snap.fields) {
      if (f.size() != n) fail(ErrorKind::Argument, "snapshot field length does not match grid");
      for (std::size_t i = 0; i < n; ++i) words[i] = to_little_endian(std::bit_cast<std::uint64_t>(f[i]));
      out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(n * 8));
    }
    if (!out) io_error(bin, "write failed");
  }
  std::string text;
  text += "format = smectic-snapshot-1\n";
  text += "byte_order = little\n";
  text += "dtype = float64\n";
  text += "layout = x_fastest\n";
  text += "d = " + std::to_string(snap.grid.dim) + "\n";
  text += "J = " + std::to_string(snap.grid.points) + "\n";
  text += "L = " + fmt17(snap.grid.length) + "\n";
  text += "time = " + fmt17(snap.time) + "\n";
  text += "s = " + fmt17(snap.s) + "\n";
  text += "step = " + std::to_string(snap.step) + "\n";
  text += "fields =";
  for (const auto& name : snap.names) text += " " + name;
  text += "\n";
  write_text(hdr, text);
}

Snapshot read_snapshot(const fs::path& stem) {
  fs::path bin = stem;
  bin += ".bin";
  fs::path hdr = stem;
  hdr += ".hdr";
  std::istringstream in(read_text(hdr));
  std::string line;
  int d = 0, J = 0;
  double L = 0.0;
  Snapshot snap;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      if (line.rfind("fields =", 0) == 0) {
        std::istringstream names(line.substr(8));
        std::string name;
        while (names >> name) snap.names.push_back(name);
      }
      continue;
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "byte_order" && value != "little") io_error(hdr, "unsupported byte order " + value);
    if (key == "d") d = std::stoi(value);
    if (key == "J") J = std::stoi(value);
    if (key == "L") L = std::strtod(value.c_str(), nullptr);
    if (key == "time") snap.time = std::strtod(value.c_str(), nullptr);
    if (key == "s") snap.s = std::strtod(value.c_str(), nullptr);
    if (key == "step") snap.step = std::stol(value);
    if (key == "fields") {
      std::istringstream names(value);
      std::string name;
      while (names >> name) snap.names.push_back(name);
    }
  }
  if (d == 0 || J == 0 || snap.names.empty()) io_error(hdr, "incomplete header");
  snap.grid = GridSpec::make(d, J, L);
  const std::size_t n = snap.grid.size();

  std::ifstream data(bin, std::ios::binary);
  if (!data) io_error(bin, "cannot open for reading");
  std::vector<std::uint64_t> words(n);
  for (std::size_t f = 0; f < snap.names.size(); ++f) {
    data.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(n * 8));
    if (!data) io_error(bin, "truncated data");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = std::bit_cast<double>(to_little_endian(words[i]));
    snap.fields.push_back(std::move(values));
  }
  return snap;
}

void export_field_csv(const ScalarField& f, const fs::path& path) {
  const GridSpec& g = f.grid();
  if (g.dim != 2) fail(ErrorKind::Argument, "CSV field export is 2D only");
  std::string text;
  for (int j = 0; j < g.points; ++j) {
    for (int i = 0; i < g.points; ++i) {
      if (i) text += ',';
      text += fmt17(f.at(i, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

fs::path snapshot_stem(const fs::path& dir, long step) {
  char name[32];
  std::snprintf(name, sizeof name, "snap_%08ld", step);
  return dir / name;
}

void SnapshotWriter::on_snapshot(const SolverState& state) {
  write_snapshot(make_snapshot(state), snapshot_stem(dir_, state.step_index));
  ++written_;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  out << text;
  if (!out) io_error(path, "write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

std::string summary_json(const RunConfig& cfg, const RunSummary& s) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(cfg.mode);
  j["steps"] = s.steps;
  j["t"] = s.t;
  j["E_modified_initial"] = s.E_modified_initial;
  j["E_original_initial"] = s.E_original_initial;
  j["E_modified_final"] = s.last.E_modified;
  j["E_original_final"] = s.last.E_original;
  j["sup_F_initial"] = s.sup_F_initial;
  j["sup_F_final"] = s.last.sup_F;
  j["max_energy_increase"] = s.steps > 0 ? s.max_energy_increase : 0.0;
  j["g_min"] = s.g_min;
  j["g_max"] = s.g_max;
  j["tau_min_used"] = s.tau_min_used;
  j["tau_max_used"] = s.tau_max_used;
  if (cfg.mbp_monitor || cfg.mbp_enforce_kappa) {
    j["mbp"] = {{"eta", s.mbp_eta},
                {"kappa0", s.mbp_kappa0},
                {"violations", s.mbp_violations},
                {"first_violation", s.mbp_first_violation},
                {"max_ratio", s.mbp_max_ratio},
                {"kappa1_last", s.last.kappa1_used}};
  }
  return j.dump(2) + "\n";
}

RunSummary run_to_directory(const RunConfig& cfg, const fs::path& out) {
  SolverState state = initial_state(cfg);
  return run_to_directory(state, cfg, out);
}

RunSummary run_to_directory(SolverState& state, const RunConfig& cfg, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) io_error(out, ec.message());
  write_text(out / "config.txt", save_config(cfg));

  DiagnosticsWriter diagnostics(out / "diagnostics.csv");
  SnapshotWriter snapshots(out);
  snapshots.on_snapshot(state);
  RunSink* sinks[] = {&diagnostics, &snapshots};

  RunOptions options;
  options.t_final = cfg.T_final;
  options.snapshot_every = cfg.snapshot_every;
  const RunSummary summary = run(state, cfg.step_config(), options, sinks);

  if (cfg.snapshot_every == 0 || summary.steps % cfg.snapshot_every != 0) snapshots.on_snapshot(state);
  write_text(out / "summary.json", summary_json(cfg, summary));
  return summary;
}

}  // namespace smectic
