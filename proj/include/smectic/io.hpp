#pragma once

// Diagnostics CSV, binary snapshots with text sidecars, and the run driver
// that writes both next to a config echo.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "smectic/config.hpp"
#include "smectic/stepper.hpp"

namespace smectic {

inline constexpr const char* kDiagnosticsHeader =
    "step,t,tau,sup_F_Q,max_u,min_u,E_modified,E_original,e1h,s,g,xi,R";

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double tau = 0.0;
  double sup_F_Q = 0.0;
  double max_u = 0.0;
  double min_u = 0.0;
  double E_modified = 0.0;
  double E_original = 0.0;
  double e1h = 0.0;
  double s = 0.0;
  double g = 0.0;
  double xi = 0.0;
  double R = 0.0;
};

DiagnosticsRecord make_record(const SolverState& state, const StepDiagnostics& diag);
std::string format_record(const DiagnosticsRecord& r);

void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path);

/// Streams one CSV row per completed step.
class DiagnosticsWriter : public RunSink {
 public:
  explicit DiagnosticsWriter(const std::filesystem::path& path);
  ~DiagnosticsWriter() override;
  DiagnosticsWriter(const DiagnosticsWriter&) = delete;
  DiagnosticsWriter& operator=(const DiagnosticsWriter&) = delete;

  void on_step(const SolverState& state, const StepDiagnostics& diag) override;
  long rows() const { return rows_; }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  long rows_ = 0;
};

struct Snapshot {
  GridSpec grid;
  double time = 0.0;
  double s = 0.0;
  long step = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> fields;  // each of length J^d, x fastest

  const std::vector<double>& field(const std::string& name) const;
};

/// Fields: u, the compact Q components (q11, q12 | q11, q22, q12, q13, q23)
/// and lambda_max, the largest eigenvalue of Q.
Snapshot make_snapshot(const SolverState& state);
/// Recovers (Q, u, s, t, step) from a snapshot made by make_snapshot.
SolverState state_from_snapshot(const Snapshot& snap);

/// Writes <stem>.bin (little-endian float64, fields back to back) and <stem>.hdr.
void write_snapshot(const Snapshot& snap, const std::filesystem::path& stem);
Snapshot read_snapshot(const std::filesystem::path& stem);

/// One row per y index, comma-separated over x. 2D only.
void export_field_csv(const ScalarField& f, const std::filesystem::path& path);

class SnapshotWriter : public RunSink {
 public:
  explicit SnapshotWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void on_step(const SolverState&, const StepDiagnostics&) override {}
  void on_snapshot(const SolverState& state) override;
  long written() const { return written_; }

 private:
  std::filesystem::path dir_;
  long written_ = 0;
};

std::filesystem::path snapshot_stem(const std::filesystem::path& dir, long step);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Runs cfg from its initial data to T_final, writing into out:
///   config.txt        exact config echo
///   diagnostics.csv   one row per step
///   snap_NNNNNNNN.*   every snapshot_every steps, plus initial and final
///   summary.json
RunSummary run_to_directory(const RunConfig& cfg, const std::filesystem::path& out);
/// Same, starting from an explicit state.
RunSummary run_to_directory(SolverState& state, const RunConfig& cfg, const std::filesystem::path& out);

std::string summary_json(const RunConfig& cfg, const RunSummary& summary);

}  // namespace smectic
