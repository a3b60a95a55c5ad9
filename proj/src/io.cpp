// io.cpp -- config/manifest parsing and the on-disk formats.

#include "bfsurf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace bfsurf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, const std::string& key, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
        throw ConfigError("line " + std::to_string(line) + ": invalid real for key '" +
                          key + "': '" + v + "'");
    return x;
}

long long parse_int(const std::string& v, const std::string& key, int line) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("line " + std::to_string(line) + ": invalid integer for key '" +
                          key + "': '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("line " + std::to_string(line) + ": invalid seed for key '" +
                          key + "': '" + v + "'");
    return static_cast<std::uint64_t>(x);
}

std::vector<double> parse_real_list(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_real(item, key, line));
    }
    return out;
}

const std::vector<std::string> kConfigKeys = {
    "mode",       "n_cells",        "length",     "eps",
    "alpha",      "beta",           "eta",        "xi",
    "delta",      "mobility",       "dt",         "t_final",
    "seed",       "newton_tol",     "newton_max_iter", "linear_tol",
    "boundary_fraction", "snapshot_times", "output_dir"};

// Manifests additionally carry these informational/resolved-only keys.
const std::vector<std::string> kManifestOnlyKeys = {"version", "config", "damping_min"};

void require_positive_cfg(double v, const std::string& key) {
    if (!(v > 0.0))
        throw ConfigError("range error: '" + key + "' must be > 0, got " +
                          std::to_string(v));
}

RunManifest parse_keyvalue(const std::string& text, const std::string& origin,
                           bool manifest_form) {
    std::map<std::string, std::pair<std::string, int>> kv;
    {
        std::istringstream ss(text);
        std::string raw;
        int line = 0;
        while (std::getline(ss, raw)) {
            ++line;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string s = trim(raw);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line) +
                                  ": expected 'key = value', got '" + s + "'");
            const std::string key = trim(s.substr(0, eq));
            const std::string val = trim(s.substr(eq + 1));
            const bool known =
                std::find(kConfigKeys.begin(), kConfigKeys.end(), key) != kConfigKeys.end() ||
                (manifest_form &&
                 std::find(kManifestOnlyKeys.begin(), kManifestOnlyKeys.end(), key) !=
                     kManifestOnlyKeys.end());
            if (!known)
                throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
            if (kv.count(key))
                throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
            kv[key] = {val, line};
        }
    }

    auto has = [&](const std::string& k) { return kv.count(k) != 0; };
    auto get = [&](const std::string& k) -> const std::pair<std::string, int>& {
        return kv.at(k);
    };

    RunManifest m;
    m.version = "bfsurf 0.1.0";
    m.config_path = origin;

    if (!has("mode")) throw ConfigError("missing required key 'mode'");
    const std::string mode_str = get("mode").first;
    if (mode_str == "convergence")
        m.mode = RunMode::convergence;
    else if (mode_str == "spinodal")
        m.mode = RunMode::spinodal;
    else if (mode_str == "single-step")
        m.mode = RunMode::single_step;
    else if (mode_str == "property-suite")
        m.mode = RunMode::property_suite;
    else
        throw ConfigError("line " + std::to_string(get("mode").second) +
                          ": mode must be one of convergence, spinodal, single-step, "
                          "property-suite");

    const bool needs_physics = m.mode != RunMode::property_suite;
    const std::vector<std::string> required = {"n_cells", "length", "eps",  "alpha",
                                               "beta",    "eta",    "xi",   "delta",
                                               "mobility", "dt",    "t_final"};
    if (needs_physics)
        for (const auto& k : required)
            if (!has(k)) throw ConfigError("missing required key '" + k + "'");

    auto real_or = [&](const std::string& k, double fallback) {
        return has(k) ? parse_real(get(k).first, k, get(k).second) : fallback;
    };

    m.n_cells = needs_physics
                    ? static_cast<int>(parse_int(get("n_cells").first, "n_cells",
                                                 get("n_cells").second))
                    : (has("n_cells") ? static_cast<int>(parse_int(get("n_cells").first,
                                                                   "n_cells",
                                                                   get("n_cells").second))
                                      : 16);
    if (m.n_cells < 4) throw ConfigError("range error: 'n_cells' must be >= 4");
    m.length = real_or("length", 8.0);
    require_positive_cfg(m.length, "length");

    m.params.eps = real_or("eps", 1.0);
    m.params.alpha = real_or("alpha", 1.0);
    m.params.beta = real_or("beta", 1.0);
    m.params.eta = real_or("eta", 1.0);
    m.params.xi = real_or("xi", 1.0);
    m.params.delta = real_or("delta", 1.0);
    m.params.mobility = real_or("mobility", 1.0);
    m.params.dt = real_or("dt", 1.0);
    for (const auto& [key, value] :
         std::initializer_list<std::pair<const char*, double>>{
             {"eps", m.params.eps}, {"alpha", m.params.alpha}, {"beta", m.params.beta},
             {"eta", m.params.eta}, {"xi", m.params.xi}, {"delta", m.params.delta},
             {"mobility", m.params.mobility}, {"dt", m.params.dt}})
        require_positive_cfg(value, key);

    m.t_final = real_or("t_final", 1.0);
    require_positive_cfg(m.t_final, "t_final");
    m.seed = has("seed") ? parse_u64(get("seed").first, "seed", get("seed").second) : 1;

    m.solver.newton_tol = real_or("newton_tol", 0.0);
    if (has("newton_tol")) require_positive_cfg(m.solver.newton_tol, "newton_tol");
    if (has("newton_max_iter"))
        m.solver.newton_max_iter = static_cast<int>(
            parse_int(get("newton_max_iter").first, "newton_max_iter",
                      get("newton_max_iter").second));
    m.solver.linear_tol = real_or("linear_tol", m.solver.linear_tol);
    m.solver.boundary_fraction = real_or("boundary_fraction", m.solver.boundary_fraction);
    if (manifest_form) m.solver.damping_min = real_or("damping_min", m.solver.damping_min);
    try {
        m.solver.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("range error: ") + e.what());
    }

    if (has("snapshot_times"))
        m.snapshot_times = parse_real_list(get("snapshot_times").first, "snapshot_times",
                                           get("snapshot_times").second);
    for (double t : m.snapshot_times)
        if (t < 0.0 || t > m.t_final)
            throw ConfigError("range error: snapshot_times must lie in [0, t_final]");
    if (has("output_dir")) m.output_dir = get("output_dir").first;
    if (manifest_form && has("config")) m.config_path = get("config").first;
    return m;
}

} // namespace

std::string to_string(RunMode m) {
    switch (m) {
    case RunMode::convergence: return "convergence";
    case RunMode::spinodal: return "spinodal";
    case RunMode::single_step: return "single-step";
    case RunMode::property_suite: return "property-suite";
    }
    return "?";
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RunConfig RunManifest::run_config() const {
    RunConfig cfg{grid(), params, solver, t_final, snapshot_times, seed, output_dir};
    return cfg;
}

std::string RunManifest::to_text() const {
    std::ostringstream os;
    os << "# bfsurf run manifest\n";
    os << "version = " << version << "\n";
    os << "mode = " << to_string(mode) << "\n";
    os << "config = " << config_path << "\n";
    os << "output_dir = " << output_dir << "\n";
    os << "n_cells = " << n_cells << "\n";
    os << "length = " << format_full(length) << "\n";
    os << "eps = " << format_full(params.eps) << "\n";
    os << "alpha = " << format_full(params.alpha) << "\n";
    os << "beta = " << format_full(params.beta) << "\n";
    os << "eta = " << format_full(params.eta) << "\n";
    os << "xi = " << format_full(params.xi) << "\n";
    os << "delta = " << format_full(params.delta) << "\n";
    os << "mobility = " << format_full(params.mobility) << "\n";
    os << "dt = " << format_full(params.dt) << "\n";
    os << "t_final = " << format_full(t_final) << "\n";
    os << "seed = " << seed << "\n";
    os << "snapshot_times = ";
    for (std::size_t i = 0; i < snapshot_times.size(); ++i)
        os << (i ? "," : "") << format_full(snapshot_times[i]);
    os << "\n";
    os << "newton_tol = " << format_full(solver.resolved_newton_tol(grid())) << "\n";
    os << "newton_max_iter = " << solver.newton_max_iter << "\n";
    os << "linear_tol = " << format_full(solver.linear_tol) << "\n";
    os << "boundary_fraction = " << format_full(solver.boundary_fraction) << "\n";
    os << "damping_min = " << format_full(solver.damping_min) << "\n";
    return os.str();
}

std::uint64_t RunManifest::result_hash() const {
    const std::string text = to_text();
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("config =", 0) == 0 || line.rfind("output_dir =", 0) == 0 ||
            line.rfind("#", 0) == 0)
            continue;
        for (char c : line) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        h ^= static_cast<unsigned char>('\n');
        h *= 0x100000001b3ull;
    }
    return h;
}

RunManifest parse_config(const std::string& text, const std::string& origin) {
    return parse_keyvalue(text, origin, false);
}

RunManifest parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

RunManifest parse_manifest_text(const std::string& text) {
    return parse_keyvalue(text, "manifest", true);
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "manifest.txt");
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << m.to_text();
}

void write_snapshot(const std::filesystem::path& path, const CellField& f, double time) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write snapshot: " + path.string());
    const int n = f.n();
    out << n << " " << format_full(f.grid().length) << " " << format_full(time) << "\n";
    char buf[32];
    for (int i = 0; i < n; ++i) {
        std::string line;
        line.reserve(static_cast<std::size_t>(n) * 26);
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17e", f(i, j));
            if (j) line += ' ';
            line += buf;
        }
        out << line << "\n";
    }
    if (!out) throw IoError("short write: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot: " + path.string());
    int n = 0;
    double length = 0.0, time = 0.0;
    if (!(in >> n >> length >> time)) throw IoError("bad snapshot header: " + path.string());
    CellField f(GridSpec(n, length));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(in >> f(i, j))) throw IoError("truncated snapshot: " + path.string());
    return {std::move(f), time};
}

EnergyCsvWriter::EnergyCsvWriter(const std::filesystem::path& path,
                                 std::optional<long> truncate_after_step)
    : path_(path) {
    if (truncate_after_step && std::filesystem::exists(path_)) {
        std::ifstream in(path_);
        std::string line, kept;
        bool have_header = false;
        while (std::getline(in, line)) {
            if (!have_header) {
                kept = line + "\n";
                have_header = true;
                continue;
            }
            const long step = std::strtol(line.c_str(), nullptr, 10);
            if (step <= *truncate_after_step) kept += line + "\n";
        }
        in.close();
        if (have_header) {
            std::ofstream out(path_, std::ios::trunc);
            out << kept;
            return;
        }
    }
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw IoError("cannot write csv: " + path_.string());
    out << "step,time,E_total,E_convex,E_concave,mass_phi,mass_rho,rho_min,rho_max,"
           "newton_iters,residual\n";
}

EnergyCsvWriter::~EnergyCsvWriter() = default;

void EnergyCsvWriter::row(long step, double time, const StepDiagnostics& d) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot append csv: " + path_.string());
    out << step << ',' << format_full(time) << ',' << format_full(d.energy.total) << ','
        << format_full(d.energy.convex) << ',' << format_full(d.energy.concave) << ','
        << format_full(d.mass_phi) << ',' << format_full(d.mass_rho) << ','
        << format_full(d.rho_min) << ',' << format_full(d.rho_max) << ','
        << d.newton_iters << ',' << format_full(d.final_residual) << "\n";
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write csv: " + path.string());
    out << "grid_n,error_phi,rate_phi,error_rho,rate_rho\n";
    for (const auto& r : rows) {
        out << r.grid_n << ',' << format_full(r.error_phi) << ',';
        if (std::isfinite(r.rate_phi)) out << format_full(r.rate_phi);
        out << ',' << format_full(r.error_rho) << ',';
        if (std::isfinite(r.rate_rho)) out << format_full(r.rate_rho);
        out << "\n";
    }
}

void write_checkpoint(const std::filesystem::path& path, const State& s,
                      const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(m.result_hash()));
    out << "bfsurf-checkpoint v1\n";
    out << "hash " << hex << "\n";
    out << "step " << s.step << "\n";
    out << "time " << format_full(s.time) << "\n";
    out << "manifest-begin\n" << m.to_text() << "manifest-end\n";
    const int n = s.grid().n;
    char buf[32];
    for (const CellField* f : {&s.phi, &s.rho}) {
        for (int i = 0; i < n; ++i) {
            std::string line;
            line.reserve(static_cast<std::size_t>(n) * 26);
            for (int j = 0; j < n; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17e", (*f)(i, j));
                if (j) line += ' ';
                line += buf;
            }
            out << line << "\n";
        }
    }
    if (!out) throw IoError("short checkpoint write: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "bfsurf-checkpoint v1")
        throw IoError("not a bfsurf checkpoint: " + path.string());
    std::uint64_t stored_hash = 0;
    long step = 0;
    double time = 0.0;
    if (!std::getline(in, line) || line.rfind("hash ", 0) != 0)
        throw IoError("checkpoint missing hash line");
    stored_hash = std::strtoull(line.c_str() + 5, nullptr, 16);
    if (!std::getline(in, line) || line.rfind("step ", 0) != 0)
        throw IoError("checkpoint missing step line");
    step = std::strtol(line.c_str() + 5, nullptr, 10);
    if (!std::getline(in, line) || line.rfind("time ", 0) != 0)
        throw IoError("checkpoint missing time line");
    time = std::strtod(line.c_str() + 5, nullptr);
    if (!std::getline(in, line) || line != "manifest-begin")
        throw IoError("checkpoint missing manifest");
    std::string manifest_text;
    while (std::getline(in, line) && line != "manifest-end") manifest_text += line + "\n";
    if (line != "manifest-end") throw IoError("unterminated manifest block");
    RunManifest m = parse_manifest_text(manifest_text);
    if (m.result_hash() != stored_hash)
        throw IoError("checkpoint hash does not match its embedded manifest");

    CellField phi(m.grid()), rho(m.grid());
    for (CellField* f : {&phi, &rho})
        for (int i = 0; i < m.n_cells; ++i)
            for (int j = 0; j < m.n_cells; ++j)
                if (!(in >> (*f)(i, j))) throw IoError("truncated checkpoint fields");
    State s(std::move(phi), std::move(rho), time, step);
    if (!s.phi.all_finite() || !s.rho.all_finite())
        throw IoError("checkpoint contains non-finite values");
    return {std::move(s), std::move(m), stored_hash};
}

} // namespace bfsurf
