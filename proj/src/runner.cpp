#include "fnlslab/runner.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "fnlslab/gauges.hpp"
#include "fnlslab/masses.hpp"
#include "fnlslab/nonlinearity.hpp"
#include "fnlslab/norms.hpp"
#include "fnlslab/random_data.hpp"
#include "fnlslab/snapshot_io.hpp"
#include "fnlslab/version.hpp"

namespace fs = std::filesystem;

namespace fnls {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path.string() + ": short write");
}

struct MassContext {
    IOperatorSpec iop;
    double alpha;
    double coupling;
    std::shared_ptr<PsiContext> psi; // null for ungauged flows

    const PsiContext* psi_ptr() const { return psi ? psi.get() : nullptr; }
};

MassContext make_mass_context(const ExperimentConfig& cfg) {
    if (!cfg.i_operator)
        throw ConfigError(cfg.source_path + ": mass diagnostics require the i_operator section");
    MassContext ctx{*cfg.i_operator, cfg.equation.alpha, cfg.equation.coupling(), nullptr};
    if (cfg.equation.form == EquationForm::gauged)
        ctx.psi = std::make_shared<PsiContext>(
            PsiContext{*cfg.equation.reference_data, cfg.equation.phase_coupling()});
    return ctx;
}

} // namespace

std::vector<NamedDiagnostic> build_diagnostics(const ExperimentConfig& cfg) {
    std::vector<NamedDiagnostic> out;
    for (const std::string& id : cfg.diagnostics) {
        if (id == "mass") {
            out.push_back({id, [](const SpectralField& u) { return mass(u); }});
        } else if (id == "h_s_norm") {
            NormSpec spec;
            spec.s = cfg.i_operator ? cfg.i_operator->s : critical_index(cfg.equation.alpha);
            out.push_back(
                {id, [spec](const SpectralField& u) { return sobolev_norm(u, spec); }});
        } else if (id == "modified_mass") {
            const MassContext ctx = make_mass_context(cfg);
            out.push_back(
                {id, [ctx](const SpectralField& u) { return modified_mass(u, ctx.iop); }});
        } else if (id == "corrected_mass") {
            const MassContext ctx = make_mass_context(cfg);
            out.push_back({id, [ctx](const SpectralField& u) {
                               return corrected_mass(u, ctx.iop, ctx.alpha, ctx.coupling,
                                                     ctx.psi_ptr());
                           }});
        } else if (id == "lambda4_residual_imag") {
            const MassContext ctx = make_mass_context(cfg);
            out.push_back({id, [ctx](const SpectralField& u) {
                               return corrected_mass_detailed(u, ctx.iop, ctx.alpha,
                                                              ctx.coupling, ctx.psi_ptr())
                                   .imag_residual;
                           }});
        } else {
            throw ConfigError(cfg.source_path + ": unknown diagnostic id '" + id + "'");
        }
    }
    return out;
}

std::string diagnostics_csv(const Trajectory& traj) {
    std::string csv = "t";
    for (const std::string& name : traj.diagnostic_names) csv += "," + name;
    csv += "\r\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        csv += fmt(traj.times[i]);
        for (double value : traj.diagnostic_rows[i]) csv += "," + fmt(value);
        csv += "\r\n";
    }
    return csv;
}

namespace {

nlohmann::json manifest_json(const ExperimentConfig& cfg, const Trajectory& traj) {
    nlohmann::json m;
    m["name"] = cfg.name;
    m["version"] = version;
    m["git_sha"] = git_sha;
    m["config"] = nlohmann::json::parse(cfg.source_text);
    m["completed"] = traj.completed();
    m["stored_samples"] = traj.times.size();
    m["diagnostics"] = traj.diagnostic_names;
    if (traj.failure) {
        m["failure"]["time"] = traj.failure->time;
        m["failure"]["message"] = traj.failure->message;
    }
    return m;
}

void write_run_artifacts(const fs::path& dir, const ExperimentConfig& cfg,
                         const Trajectory& traj) {
    fs::create_directories(dir / "snapshots");
    write_text(dir / "manifest.json", manifest_json(cfg, traj).dump(2) + "\n");
    write_text(dir / "diagnostics.csv", diagnostics_csv(traj));
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.fnls", i);
        write_snapshot(dir / "snapshots" / name, traj.snapshots[i]);
    }
    if (traj.failure)
        write_text(dir / "FAILED", "t=" + fmt(traj.failure->time) + "\n" +
                                       traj.failure->message + "\n");
}

// Stage into a run-private tmp dir, then atomically rename into place.
class StagedDir {
  public:
    StagedDir(const std::string& output_dir, const std::string& name) {
        static std::atomic<unsigned> counter{0};
        fs::create_directories(output_dir);
        final_ = fs::path(output_dir) / name;
        if (fs::exists(final_))
            throw ConfigError(final_.string() + ": output directory already exists");
        tmp_ = fs::path(output_dir) /
               (name + ".tmp-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(tmp_);
    }
    ~StagedDir() {
        std::error_code ec;
        if (!committed_) fs::remove_all(tmp_, ec);
    }
    const fs::path& staging() const { return tmp_; }
    const fs::path& target() const { return final_; }
    void commit() {
        fs::rename(tmp_, final_);
        committed_ = true;
    }

  private:
    fs::path tmp_;
    fs::path final_;
    bool committed_ = false;
};

} // namespace

RunResult simulate_to_directory(const ExperimentConfig& cfg, const std::string& output_override) {
    const std::string base = output_override.empty() ? cfg.output_dir : output_override;
    StagedDir staged(base, cfg.name);
    const Trajectory traj = run(cfg.grid, cfg.equation, cfg.integrator, build_diagnostics(cfg));
    write_run_artifacts(staged.staging(), cfg, traj);
    staged.commit();
    return {staged.target().string(), traj.completed()};
}

std::string VerifySummary::to_json() const {
    nlohmann::json j;
    j["all_pass"] = all_pass;
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"measured", c.measured},
                               {"tolerance", c.tolerance},
                               {"pass", c.pass}});
    return j.dump(2);
}

std::string VerifySummary::to_text() const {
    std::ostringstream out;
    for (const CheckResult& c : checks) {
        out << (c.pass ? "pass  " : "FAIL  ") << c.name;
        if (c.name.size() < 36) out << std::string(36 - c.name.size(), ' ');
        out << " measured " << fmt(c.measured) << "  tolerance " << fmt(c.tolerance) << "\n";
    }
    out << (all_pass ? "all checks passed\n" : "CHECKS FAILED\n");
    return out.str();
}

namespace {

double banded_field_mass(const SpectralField& u) {
    double m = 0.0;
    for (int n = -u.grid.cutoff(); n <= u.grid.cutoff(); ++n) m += std::norm(u.at(n));
    return m;
}

// max |a - b| over the dealias band, relative to max(1, linf(a)).
double relative_linf_diff(const SpectralField& a, const SpectralField& b) {
    double diff = 0.0, scale = 1.0;
    for (int n = -a.grid.cutoff(); n <= a.grid.cutoff(); ++n) {
        diff = std::max(diff, std::abs(a.at(n) - b.at(n)));
        scale = std::max(scale, std::abs(a.at(n)));
    }
    return diff / scale;
}

double renormalization_identity_error(const GridSpec& grid, std::uint64_t seed) {
    const SpectralField v = random_rough(grid, seed, 1.0, 0.5);
    const SpectralField full = cubic_term(v);
    const SpectralField gamma = nonresonant_sum_direct(v);
    const double m = banded_field_mass(v);
    SpectralField rhs(grid, v.time);
    for (int n = -grid.cutoff(); n <= grid.cutoff(); ++n) {
        const cplx vn = v.at(n);
        rhs.at(n) = gamma.at(n) - std::norm(vn) * vn + 2.0 * m * vn;
    }
    return relative_linf_diff(full, rhs);
}

// 4th-order central difference of a sampled scalar, spacing h.
double fd4(const std::vector<double>& f, std::size_t center, double h) {
    return (-f[center + 2] + 8.0 * f[center + 1] - 8.0 * f[center - 1] + f[center - 2]) /
           (12.0 * h);
}

} // namespace

VerifySummary run_verify_suite(const ExperimentConfig& cfg) {
    VerifySummary summary;
    auto record = [&](const std::string& name, double measured, double tolerance) {
        const bool pass = measured <= tolerance;
        summary.checks.push_back({name, measured, tolerance, pass});
        summary.all_pass = summary.all_pass && pass;
    };
    const double alpha = cfg.equation.alpha;

    {
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            worst = std::max(worst, renormalization_identity_error(GridSpec(32), seed));
            worst = std::max(worst, renormalization_identity_error(GridSpec(128), seed + 100));
        }
        record("renormalization_identity", worst, 1e-12);
    }

    {
        // Hop times keep |n|^alpha * t at O(1) so phase-argument rounding sits
        // well below the group-law bound.
        const SpectralField f = random_rough(GridSpec(64), 7, 1.0, 0.5);
        const SpectralField two_hops =
            free_evolve(free_evolve(f, 3.0e-4, alpha), 4.5e-4, alpha);
        const SpectralField one_hop = free_evolve(f, 7.5e-4, alpha);
        record("free_flow_group_law", relative_linf_diff(one_hop, two_hops), 1e-14);
    }

    {
        EquationSpec eq = cfg.equation;
        eq.form = EquationForm::renormalized;
        eq.reference_data.reset();
        eq.initial_data.kind = InitialDataSpec::Kind::smooth;
        eq.initial_data.amplitude = 0.4;
        eq.initial_data.n0 = 2.0;
        IntegratorSpec integ;
        integ.dt = 1e-3;
        integ.t_end = 0.1;
        integ.store_every = 100;
        const Trajectory traj = run(GridSpec(64), eq, integ);
        const double m0 = mass(traj.snapshots.front());
        double drift = 0.0;
        for (const SpectralField& snap : traj.snapshots)
            drift = std::max(drift, std::abs(mass(snap) - m0) / m0);
        record("mass_conservation_smoke", drift, 1e-8);
    }

    {
        EquationSpec eq;
        eq.alpha = 3.0;
        eq.initial_data.kind = InitialDataSpec::Kind::smooth;
        eq.initial_data.amplitude = 0.5;
        IntegratorSpec integ;
        integ.dt = 1e-3;
        integ.t_end = 0.25;
        integ.store_every = 50;
        eq.form = EquationForm::original;
        const Trajectory original = run(GridSpec(32), eq, integ);
        eq.form = EquationForm::renormalized;
        const Trajectory renorm = run(GridSpec(32), eq, integ);
        double worst = 0.0;
        for (std::size_t i = 0; i < original.snapshots.size(); ++i) {
            const SpectralField gauged =
                gauge_G(original.snapshots[i], GaugeDirection::forward, eq.phase_coupling());
            double l2 = 0.0;
            for (int n = -gauged.grid.cutoff(); n <= gauged.grid.cutoff(); ++n)
                l2 += std::norm(gauged.at(n) - renorm.snapshots[i].at(n));
            worst = std::max(worst, std::sqrt(l2));
        }
        record("gauge_G_equivalence_smoke", worst, 1e-6);
    }

    {
        const BoundReport control = check_resonance_bound(2.0, 24);
        record("resonance_bound_alpha2_control", std::abs(control.worst_ratio - 2.0), 1e-12);
        const BoundReport bound = check_resonance_bound(alpha, 24);
        summary.checks.push_back({"resonance_bound_strictly_positive", bound.worst_ratio, 0.0,
                                  bound.worst_ratio > 0.0});
        summary.all_pass = summary.all_pass && summary.checks.back().pass;
    }

    {
        Rng rng(42);
        long long violations = 0;
        for (int sample = 0; sample < 100; ++sample) {
            const double n = 8.0 + 56.0 * ((rng.raw() >> 11) * 0x1.0p-53);
            const double a = 2.25 + 1.75 * ((rng.raw() >> 11) * 0x1.0p-53);
            const double tau =
                (2.0 * ((rng.raw() >> 11) * 0x1.0p-53) - 1.0) * std::pow(n, a);
            const auto phase = [&](double x) {
                return tau - std::pow(std::abs(x), a) + std::pow(std::abs(n - x), a);
            };
            const double floor_gp = a * std::pow(n / 2.0, a - 1.0);
            try {
                check_counting_lemma(phase, {-1.0, 1.0}, {n / 2.0, n}, floor_gp);
            } catch (const std::exception&) {
                ++violations;
            }
        }
        record("counting_lemma_violations", double(violations), 0.0);
    }

    {
        EquationSpec eq;
        eq.alpha = 3.0;
        eq.form = EquationForm::original;
        eq.initial_data.kind = InitialDataSpec::Kind::smooth;
        eq.initial_data.amplitude = 0.5;
        IntegratorSpec integ;
        integ.dt = 1e-3;
        integ.t_end = 0.02;
        integ.store_every = 1;
        const IOperatorSpec iop{-0.5, 4.0, std::nullopt};
        const Trajectory traj = run(GridSpec(16), eq, integ);
        std::vector<double> series;
        for (const SpectralField& snap : traj.snapshots)
            series.push_back(modified_mass(snap, iop));
        const std::size_t center = series.size() / 2;
        const double fd = fd4(series, center, integ.dt);
        const double rhs = mass_derivative_rhs(traj.snapshots[center], iop, eq.alpha, 4,
                                               eq.coupling(), nullptr);
        record("derivative_law_order4_smoke", std::abs(fd - rhs), 1e-4);
    }

    {
        const SpectralField u = random_rough(GridSpec(32), 9, 1.0, 0.5);
        const IOperatorSpec iop{-0.5, 8.0, std::nullopt};
        const CorrectedMass cm = corrected_mass_detailed(u, iop, alpha, 1.0, nullptr);
        record("corrected_mass_imag_residual", cm.imag_residual,
               1e-12 * std::max(1.0, std::abs(cm.correction)));
    }

    {
        const SpectralField a = random_rough(GridSpec(64), cfg.seed, 1.0, 0.5);
        const SpectralField b = random_rough(GridSpec(64), cfg.seed, 1.0, 0.5);
        record("rng_determinism", relative_linf_diff(a, b), 0.0);
    }

    return summary;
}

BoundReport run_probe(const ExperimentConfig& cfg) {
    const double alpha = cfg.equation.alpha;
    const ProbeSettings& p = cfg.probe;
    if (p.kind == "strichartz_l4")
        return probe_strichartz(alpha, p.b, LebesgueExponent::l4, p.ensemble);
    if (p.kind == "strichartz_l6")
        return probe_strichartz(alpha, p.b, LebesgueExponent::l6, p.ensemble);
    if (p.kind == "trilinear_line")
        return probe_trilinear(alpha, p.s, TrilinearForm::line, p.ensemble);
    if (p.kind == "trilinear_circle")
        return probe_trilinear(alpha, p.s, TrilinearForm::circle, p.ensemble);
    throw ConfigError(cfg.source_path + ": unknown probe kind '" + p.kind + "'");
}

BoundReport run_probe_to_directory(const ExperimentConfig& cfg,
                                   const std::string& output_override) {
    const std::string base = output_override.empty() ? cfg.output_dir : output_override;
    StagedDir staged(base, cfg.name);
    const BoundReport report = run_probe(cfg);
    nlohmann::json m;
    m["name"] = cfg.name;
    m["version"] = version;
    m["git_sha"] = git_sha;
    m["config"] = nlohmann::json::parse(cfg.source_text);
    write_text(staged.staging() / "manifest.json", m.dump(2) + "\n");
    write_text(staged.staging() / "probe_report.json", report.to_json() + "\n");
    write_text(staged.staging() / "probe_report.txt", report.to_text());
    staged.commit();
    return report;
}

ScalingReport run_sweep(const ExperimentConfig& cfg, const std::string& output_override) {
    const std::string base = output_override.empty() ? cfg.output_dir : output_override;
    StagedDir staged(base, cfg.name);

    const Trajectory traj = run(cfg.grid, cfg.equation, cfg.integrator, build_diagnostics(cfg));
    write_run_artifacts(staged.staging(), cfg, traj);
    if (!traj.completed()) {
        staged.commit();
        throw std::runtime_error(staged.target().string() +
                                 ": trajectory aborted; sweep not evaluated (FAILED marker)");
    }

    ScalingReport report =
        sweep_almost_conservation(cfg.grid, cfg.equation, cfg.integrator,
                                  cfg.sweep.thresholds, cfg.sweep.variant, cfg.sweep.s,
                                  cfg.sweep.slack);
    report.manifest_ref = (staged.target() / "manifest.json").string();
    write_text(staged.staging() / "sweep_report.json", report.to_json() + "\n");
    write_text(staged.staging() / "sweep_report.txt", report.to_text());
    write_text(staged.staging() / "sweep.csv", report.to_csv());
    write_text(staged.staging() / "sweep.gp", report.gnuplot_script("sweep.csv"));
    staged.commit();
    return report;
}

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    cells.push_back(cell);
    return cells;
}

void render_diagnostics_csv(const fs::path& dir, std::ostringstream& out) {
    const std::string text = read_text(dir / "diagnostics.csv");
    std::istringstream lines(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(lines, line))
        if (!line.empty()) rows.push_back(split_csv_line(line));
    if (rows.empty()) return;

    out << "diagnostics.csv (" << rows.size() - 1 << " samples)\n";
    const std::size_t head = std::min<std::size_t>(rows.size(), 6);
    for (std::size_t i = 0; i < head; ++i) {
        out << "  ";
        for (const std::string& cell : rows[i])
            out << cell << std::string(cell.size() < 22 ? 22 - cell.size() : 1, ' ');
        out << "\n";
    }
    if (rows.size() > head + 1) out << "  ...\n";
    if (rows.size() > head) {
        out << "  ";
        for (const std::string& cell : rows.back())
            out << cell << std::string(cell.size() < 22 ? 22 - cell.size() : 1, ' ');
        out << "\n";
    }

    std::string gp = "set datafile separator ','\nset xlabel 't'\nset key outside\n";
    gp += "plot ";
    for (std::size_t col = 2; col <= rows[0].size(); ++col) {
        if (col > 2) gp += ", \\\n     ";
        gp += "'diagnostics.csv' skip 1 using 1:" + std::to_string(col) +
              " with lines title '" + rows[0][col - 1] + "'";
    }
    gp += "\n";
    write_text(dir / "diagnostics.gp", gp);
    out << "  wrote diagnostics.gp\n";
}

} // namespace

std::string render_report(const std::string& directory) {
    const fs::path dir(directory);
    if (!fs::is_directory(dir))
        throw std::runtime_error(directory + ": not a run directory");
    std::ostringstream out;

    if (fs::exists(dir / "manifest.json")) {
        const nlohmann::json m = nlohmann::json::parse(read_text(dir / "manifest.json"));
        out << "run '" << m.value("name", "?") << "' (version " << m.value("version", "?")
            << ", git " << m.value("git_sha", "?") << ")\n";
        out << "  completed: " << (m.value("completed", false) ? "yes" : "NO (FAILED)") << "\n";
        out << "  stored samples: " << m.value("stored_samples", 0) << "\n";
    }
    if (fs::exists(dir / "FAILED")) out << "FAILED marker:\n" << read_text(dir / "FAILED");
    if (fs::exists(dir / "diagnostics.csv")) render_diagnostics_csv(dir, out);
    if (fs::exists(dir / "sweep_report.json")) out << read_text(dir / "sweep_report.txt");
    if (fs::exists(dir / "probe_report.json")) out << read_text(dir / "probe_report.txt");

    const std::string text = out.str();
    write_text(dir / "report.txt", text);
    return text;
}

} // namespace fnls
