// runner.cpp -- manifest execution, checkpoint resume.

#include "bfsurf/runner.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bfsurf {

namespace {

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

/// Writes energy.csv rows, snapshot fields and checkpoints into the run's
/// output directory.
class DirectoryObserver : public RunObserver {
public:
    DirectoryObserver(const RunManifest& manifest, std::optional<long> resume_step)
        : manifest_(manifest), dir_(manifest.output_dir),
          csv_(dir_ / "energy.csv", resume_step) {}

    void on_initial(const State& s, const StepDiagnostics& d) override {
        csv_.row(s.step, s.time, d);
    }
    void on_step(const State& s, const StepDiagnostics& d) override {
        csv_.row(s.step, s.time, d);
    }
    void on_snapshot(const State& s) override {
        const std::string tag = time_tag(s.time);
        write_snapshot(dir_ / ("phi_t" + tag + ".dat"), s.phi, s.time);
        write_snapshot(dir_ / ("rho_t" + tag + ".dat"), s.rho, s.time);
        write_checkpoint(dir_ / ("checkpoint_t" + tag + ".dat"), s, manifest_);
    }

private:
    RunManifest manifest_;
    std::filesystem::path dir_;
    EnergyCsvWriter csv_;
};

std::vector<int> convergence_levels(int finest) {
    std::vector<int> levels;
    for (int n = 16; n <= finest; n *= 2) levels.push_back(n);
    if (levels.size() < 2 || levels.back() != finest)
        throw ConfigError("convergence mode: n_cells must be a power-of-two multiple "
                          "of 16, at least 32 (got " + std::to_string(finest) + ")");
    return levels;
}

int run_timestepping(const RunManifest& m, std::ostream& log) {
    RunConfig cfg = m.run_config();
    if (m.mode == RunMode::single_step) {
        cfg.t_final = cfg.params.dt;
        log << "single step of dt = " << cfg.params.dt << "\n";
    }
    DirectoryObserver obs(m, std::nullopt);
    RunResult result = spinodal_run(cfg, &obs);
    write_checkpoint(std::filesystem::path(m.output_dir) / "checkpoint.dat",
                     result.final_state, m);
    const auto& last = result.series.back();
    log << "completed " << result.final_state.step << " steps to t = "
        << result.final_state.time << "; E = " << last.energy.total
        << ", rho in [" << last.rho_min << ", " << last.rho_max << "]\n";
    return 0;
}

int run_convergence(const RunManifest& m, std::ostream& log) {
    const std::vector<int> levels = convergence_levels(m.n_cells);
    const auto rows = convergence_study(levels, 0.01, m.t_final, m.params, m.solver, &log);
    write_convergence_csv(std::filesystem::path(m.output_dir) / "convergence.csv", rows);
    log << "grid_n  error(phi)   rate   error(rho)   rate\n";
    for (const auto& r : rows) {
        char line[128];
        std::snprintf(line, sizeof(line), "%6d  %11.4e  %5.2f  %11.4e  %5.2f\n", r.grid_n,
                      r.error_phi, r.rate_phi, r.error_rho, r.rate_rho);
        log << line;
    }
    return 0;
}

} // namespace

int run_manifest(const RunManifest& m, std::ostream& log) {
    if (m.mode == RunMode::property_suite) return run_property_suite(log) ? 0 : 1;
    std::filesystem::create_directories(m.output_dir);
    write_manifest(m.output_dir, m);
    switch (m.mode) {
    case RunMode::convergence: return run_convergence(m, log);
    case RunMode::spinodal:
    case RunMode::single_step: return run_timestepping(m, log);
    case RunMode::property_suite: break;
    }
    return 1;
}

int resume_checkpoint(const std::filesystem::path& checkpoint_path,
                      const std::optional<std::string>& output_dir_override,
                      std::ostream& log) {
    Checkpoint cp = read_checkpoint(checkpoint_path);
    RunManifest m = cp.manifest;
    if (output_dir_override) m.output_dir = *output_dir_override;
    if (m.mode != RunMode::spinodal && m.mode != RunMode::single_step)
        throw ConfigError("resume: only spinodal and single-step runs checkpoint");

    const auto manifest_file = std::filesystem::path(m.output_dir) / "manifest.txt";
    if (std::filesystem::exists(manifest_file)) {
        std::ifstream in(manifest_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        const RunManifest existing = parse_manifest_text(ss.str());
        if (existing.result_hash() != cp.stored_hash)
            throw ConfigError("resume: manifest in " + m.output_dir +
                              " does not match the checkpoint (hash mismatch)");
    } else {
        std::filesystem::create_directories(m.output_dir);
        write_manifest(m.output_dir, m);
    }

    RunConfig cfg = m.run_config();
    if (m.mode == RunMode::single_step) cfg.t_final = cfg.params.dt;
    if (cp.state.time >= cfg.t_final - 0.5 * cfg.params.dt) {
        log << "checkpoint already at t_final; nothing to do\n";
        return 0;
    }
    DirectoryObserver obs(m, cp.state.step);
    RunResult result = continue_run(cfg, cp.state, &obs);
    write_checkpoint(std::filesystem::path(m.output_dir) / "checkpoint.dat",
                     result.final_state, m);
    log << "resumed from step " << cp.state.step << ", completed "
        << result.final_state.step << " steps to t = " << result.final_state.time << "\n";
    return 0;
}

} // namespace bfsurf
