// io.hpp -- flat key=value configuration, run manifest, field snapshots,
// CSV diagnostics and checkpoint/restart files.
//
// All reals are serialized with 17 significant digits so every file round
// trips bit-exactly through text.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bfsurf/experiments.hpp"

namespace bfsurf {

enum class RunMode { convergence, spinodal, single_step, property_suite };

std::string to_string(RunMode m);

/// Fully resolved description of a run: mode, grid, physics, solver knobs,
/// seed and outputs. Echoed verbatim to <output_dir>/manifest.txt before any
/// stepping so a run is reproducible from its manifest alone.
struct RunManifest {
    RunMode mode = RunMode::spinodal;
    std::string config_path; // origin, informational only
    int n_cells = 0;
    double length = 0.0;
    ModelParams params{};
    SolverConfig solver{};
    std::uint64_t seed = 1;
    double t_final = 0.0;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
    std::string version; // artifact version string

    GridSpec grid() const { return GridSpec(n_cells, length); }
    RunConfig run_config() const;

    /// Canonical text form (what manifest.txt contains).
    std::string to_text() const;
    /// FNV-1a hash of the result-determining lines (config path and
    /// output_dir excluded: they do not influence numbers).
    std::uint64_t result_hash() const;
};

/// Parse a flat `key = value` configuration (`#` comments). Keys are fixed;
/// unknown or duplicate keys and malformed values are ConfigErrors carrying
/// the line number, missing required keys name the first absent one, and all
/// physical parameters must be strictly positive.
RunManifest parse_config(const std::string& text, const std::string& origin);
RunManifest parse_config_file(const std::filesystem::path& path);

/// Re-parse a manifest text block (as embedded in checkpoints).
RunManifest parse_manifest_text(const std::string& text);

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

// --- field snapshots: header "N L time", then N rows of N values ---------

void write_snapshot(const std::filesystem::path& path, const CellField& f, double time);

struct Snapshot {
    CellField field;
    double time = 0.0;
};
Snapshot read_snapshot(const std::filesystem::path& path);

// --- diagnostics CSV ------------------------------------------------------

/// Append-style writer for energy.csv with the fixed column set
/// step,time,E_total,E_convex,E_concave,mass_phi,mass_rho,rho_min,rho_max,
/// newton_iters,residual.
class EnergyCsvWriter {
public:
    /// `truncate_after_step`: when resuming, existing rows with step greater
    /// than this are dropped so the continued file matches an uninterrupted run.
    explicit EnergyCsvWriter(const std::filesystem::path& path,
                             std::optional<long> truncate_after_step = std::nullopt);
    ~EnergyCsvWriter();
    void row(long step, double time, const StepDiagnostics& d);

private:
    std::filesystem::path path_;
};

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows);

// --- checkpoint / restart --------------------------------------------------

/// Full state plus the embedded manifest and its hash; restarting from a
/// checkpoint whose hash disagrees with the manifest found in the output
/// directory is an error.
void write_checkpoint(const std::filesystem::path& path, const State& s,
                      const RunManifest& m);

struct Checkpoint {
    State state;
    RunManifest manifest;
    std::uint64_t stored_hash = 0;
};
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Exact decimal formatting helpers (17 significant digits).
std::string format_full(double v);

} // namespace bfsurf
