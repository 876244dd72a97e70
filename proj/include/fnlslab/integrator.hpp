#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "fnlslab/equation.hpp"

namespace fnls {

enum class Scheme { rk4_interaction, split_step };

// Any coefficient magnitude beyond this aborts the step (focusing blow-up or
// numerical instability); fail loudly rather than march on garbage.
inline constexpr double blow_up_guard = 1e12;

struct IntegratorSpec {
    Scheme scheme = Scheme::rk4_interaction;
    double dt = 1e-3;
    double t_end = 1.0;
    int store_every = 1;

    long steps() const; // t_end/dt; throws unless dt tiles t_end to 1e-9 relative
    void validate() const;
};

// Exact free flow: coeff(n) *= e^{-i t |xi(n)|^alpha}. No truncation error;
// preserves |coeff(n)| for every n.
SpectralField free_evolve(const SpectralField& f, double t, double alpha);

class StepError : public std::runtime_error {
  public:
    StepError(double t, const std::string& message)
        : std::runtime_error(message), time(t) {}
    double time;
};

// One step of the configured scheme from u.time. Interaction-picture RK4
// conjugates by the exact free flow and runs classical RK4 on the transformed
// non-stiff ODE; with zero coupling it reduces to free_evolve exactly.
// Split-step (Strang) supports the original/renormalized forms only.
SpectralField step(const SpectralField& u, const EquationSpec& spec, double dt,
                   Scheme scheme = Scheme::rk4_interaction);

struct NamedDiagnostic {
    std::string name;
    std::function<double(const SpectralField&)> eval;
};

struct StepFailure {
    double time;
    std::string message;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> snapshots; // every store_every steps, t=0 and t_end included
    std::vector<std::string> diagnostic_names;
    std::vector<std::vector<double>> diagnostic_rows; // one row per stored sample
    std::optional<StepFailure> failure; // set when the run aborted; partial data retained

    bool completed() const { return !failure.has_value(); }
};

// Integrate from explicit data starting at u0.time. Deterministic: identical
// inputs give bit-identical trajectories.
Trajectory run_from(const SpectralField& u0, const EquationSpec& spec,
                    const IntegratorSpec& integ,
                    const std::vector<NamedDiagnostic>& diagnostics = {});

// Build initial data from spec.initial_data, then integrate from t = 0.
Trajectory run(const GridSpec& grid, const EquationSpec& spec, const IntegratorSpec& integ,
               const std::vector<NamedDiagnostic>& diagnostics = {});

} // namespace fnls
