// runner.hpp -- top-level orchestration behind the CLI: execute a manifest,
// resume from a checkpoint, run the verification suite.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "bfsurf/io.hpp"

namespace bfsurf {

/// Execute a resolved manifest. Writes manifest.txt into the output
/// directory before stepping, then the mode's outputs (energy.csv,
/// convergence.csv, snapshots, checkpoints). Returns a process exit code.
int run_manifest(const RunManifest& m, std::ostream& log);

/// Continue a spinodal or single-step run from a checkpoint. If the output
/// directory already contains a manifest.txt, its result hash must match the
/// checkpoint's; the diagnostics CSV is truncated to the checkpoint step and
/// continued so the final file matches an uninterrupted run byte for byte.
int resume_checkpoint(const std::filesystem::path& checkpoint_path,
                      const std::optional<std::string>& output_dir_override,
                      std::ostream& log);

/// Fast self-verification: discrete-calculus identities, energy split and
/// gradient consistency, convexity, safeguard arithmetic and one implicit
/// step. Prints one pass/fail line per check; true iff everything passed.
bool run_property_suite(std::ostream& log);

} // namespace bfsurf
