#pragma once

#include <string>
#include <vector>

#include "fnlslab/config.hpp"
#include "fnlslab/integrator.hpp"
#include "fnlslab/verify.hpp"

namespace fnls {

struct RunResult {
    std::string directory; // final artifact directory
    bool completed;        // false when the trajectory aborted (FAILED marker present)
};

// Diagnostic closures for the configured ids (mass, h_s_norm, modified_mass,
// corrected_mass, lambda4_residual_imag). h_s_norm uses the i_operator's s
// when configured, the scaling-critical index otherwise.
std::vector<NamedDiagnostic> build_diagnostics(const ExperimentConfig& cfg);

// RFC-4180 CSV (CRLF, header row, %.17g): t plus one column per diagnostic.
std::string diagnostics_csv(const Trajectory& traj);

// Run the configured trajectory and persist manifest.json, snapshots/ and
// diagnostics.csv. Everything is written into a run-private tmp directory and
// atomically renamed to <output>/<name>; an aborted run keeps its partial
// artifacts plus a FAILED marker file. No timestamps anywhere.
RunResult simulate_to_directory(const ExperimentConfig& cfg,
                                const std::string& output_override = "");

struct CheckResult {
    std::string name;
    double measured;
    double tolerance;
    bool pass;
};

struct VerifySummary {
    std::vector<CheckResult> checks;
    bool all_pass = true;

    std::string to_json() const;
    std::string to_text() const;
};

// Fast identity/lemma suite over the configured equation (renormalization
// identity, free-flow group law, conservation and gauge smoke runs, resonance
// and counting bounds, derivative-law smoke test, realness of the corrected
// mass, RNG determinism).
VerifySummary run_verify_suite(const ExperimentConfig& cfg);

// Evaluate the configured estimate probe (probe.kind selects it).
BoundReport run_probe(const ExperimentConfig& cfg);

// Same, persisting probe_report.{json,txt} plus a config manifest into
// <output>/<name> (atomic rename, like simulate).
BoundReport run_probe_to_directory(const ExperimentConfig& cfg,
                                   const std::string& output_override = "");

// Persist the trajectory, then measure the corrected-mass sweep over
// sweep.thresholds; writes sweep_report.{json,txt}, sweep.csv and sweep.gp
// next to the trajectory artifacts.
ScalingReport run_sweep(const ExperimentConfig& cfg, const std::string& output_override = "");

// Render the artifacts found in a run directory (diagnostics.csv,
// sweep_report.json, probe_report.json, manifest.json) into human-readable
// text; writes <dir>/report.txt plus gnuplot scripts and returns the text.
std::string render_report(const std::string& directory);

} // namespace fnls
