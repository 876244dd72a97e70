#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnlslab/equation.hpp"
#include "fnlslab/imethod.hpp"
#include "fnlslab/integrator.hpp"
#include "fnlslab/verify.hpp"

namespace fnls {

// Raised for malformed experiment configs. Parse failures carry the file path
// and line; semantic failures carry the file path and the dotted key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSettings {
    SweepVariant variant = SweepVariant::torus;
    std::vector<double> thresholds{4.0, 8.0, 16.0, 32.0};
    double s = -1.0 / 6.0;
    double slack = 1.0;
};

struct ProbeSettings {
    // strichartz_l4 | strichartz_l6 | trilinear_line | trilinear_circle
    std::string kind = "strichartz_l4";
    double b = 1.0 / 3.0;
    double s = 0.0; // trilinear Sobolev index
    EnsembleSpec ensemble;
};

// A fully validated experiment: the one artifact every run directory can be
// reproduced from. Unknown keys anywhere in the file are rejected.
struct ExperimentConfig {
    std::string name = "experiment";
    GridSpec grid{128};
    EquationSpec equation;
    IntegratorSpec integrator;
    std::optional<IOperatorSpec> i_operator;
    std::vector<std::string> diagnostics{"mass"};
    std::uint64_t seed = 1;
    std::string output_dir = "runs";
    SweepSettings sweep;
    ProbeSettings probe;

    std::string source_path = "(inline)";
    std::string source_text; // canonical JSON snapshot for the run manifest

    void validate() const;
};

// Parse + override + validate. Overrides are dotted-path key=value pairs
// (values parsed as JSON scalars, falling back to strings). The text form is
// JSON; // and /* */ comments are allowed.
ExperimentConfig parse_config_text(const std::string& text, const std::string& label,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

} // namespace fnls
