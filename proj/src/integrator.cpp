#include "fnlslab/integrator.hpp"

#include <cmath>

#include "fnlslab/nonlinearity.hpp"

namespace fnls {

long IntegratorSpec::steps() const {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("integrator: dt and t_end must be positive");
    const long n = std::lround(t_end / dt);
    if (n < 1 || std::abs(n * dt - t_end) > 1e-9 * std::max(1.0, t_end))
        throw std::invalid_argument("integrator: dt must tile t_end");
    return n;
}

void IntegratorSpec::validate() const {
    const long n = steps();
    if (store_every < 1) throw std::invalid_argument("integrator: store_every must be >= 1");
    if (n % store_every != 0)
        throw std::invalid_argument("integrator: store_every must divide the step count");
}

SpectralField free_evolve(const SpectralField& f, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("free_evolve: alpha must be positive");
    SpectralField out = f;
    out.time = f.time + t;
    for (int idx = 0; idx < f.grid.modes; ++idx) {
        const double xi = f.grid.xi(f.grid.mode_at(idx));
        out.coeffs[static_cast<std::size_t>(idx)] *=
            std::polar(1.0, -t * std::pow(std::abs(xi), alpha));
    }
    return out;
}

namespace {

// du/dt minus the linear part, per the form table in nonlinearity.hpp.
SpectralField rhs_nonlinear(const SpectralField& u, const EquationSpec& spec, double kappa) {
    if (spec.form == EquationForm::gauged) {
        SpectralField out = nonlinearity(u, spec);
        for (cplx& c : out.coeffs) c *= kappa;
        return out;
    }
    SpectralField out = nonlinearity(u, spec);
    const cplx factor{0.0, -kappa};
    for (cplx& c : out.coeffs) c *= factor;
    return out;
}

void apply_table(SpectralField& f, const std::vector<cplx>& table) {
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] *= table[i];
}

SpectralField axpy(const SpectralField& u, double h, const SpectralField& k) {
    SpectralField out = u;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += h * k.coeffs[i];
    return out;
}

struct PhaseTables {
    std::vector<cplx> half_fwd, half_bwd, full_fwd, full_bwd;

    PhaseTables(const GridSpec& g, double alpha, double dt) {
        const int K = g.modes;
        half_fwd.resize(K); half_bwd.resize(K); full_fwd.resize(K); full_bwd.resize(K);
        for (int idx = 0; idx < K; ++idx) {
            const double mu = std::pow(std::abs(g.xi(g.mode_at(idx))), alpha);
            half_fwd[static_cast<std::size_t>(idx)] = std::polar(1.0, -0.5 * dt * mu);
            half_bwd[static_cast<std::size_t>(idx)] = std::polar(1.0, 0.5 * dt * mu);
            full_fwd[static_cast<std::size_t>(idx)] = std::polar(1.0, -dt * mu);
            full_bwd[static_cast<std::size_t>(idx)] = std::polar(1.0, dt * mu);
        }
    }
};

void guard(const SpectralField& u, double t) {
    if (!u.finite()) throw StepError(t, "non-finite coefficient");
    if (u.linf_coeff() > blow_up_guard) throw StepError(t, "coefficient magnitude beyond blow-up guard");
}

// Interaction-picture (Lawson) RK4: classical RK4 applied to z(s) = S(s-t)u(s),
// which obeys the non-stiff ODE z' = S(t-s) N(S(s-t) z, s).
SpectralField step_rk4_ip(const SpectralField& u, const EquationSpec& spec, double dt,
                          const PhaseTables& tab, double kappa) {
    const double t = u.time;

    const SpectralField k1 = rhs_nonlinear(u, spec, kappa);

    SpectralField a2 = axpy(u, 0.5 * dt, k1);
    apply_table(a2, tab.half_fwd);
    a2.time = t + 0.5 * dt;
    SpectralField k2 = rhs_nonlinear(a2, spec, kappa);
    apply_table(k2, tab.half_bwd);

    SpectralField a3 = axpy(u, 0.5 * dt, k2);
    apply_table(a3, tab.half_fwd);
    a3.time = t + 0.5 * dt;
    SpectralField k3 = rhs_nonlinear(a3, spec, kappa);
    apply_table(k3, tab.half_bwd);

    SpectralField a4 = axpy(u, dt, k3);
    apply_table(a4, tab.full_fwd);
    a4.time = t + dt;
    SpectralField k4 = rhs_nonlinear(a4, spec, kappa);
    apply_table(k4, tab.full_bwd);

    SpectralField out = u;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] += (dt / 6.0) * (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] +
                                       k4.coeffs[i]);
    apply_table(out, tab.full_fwd);
    out.time = t + dt;
    return out;
}

// Strang splitting: half free flow, exact nonlinear rotation in physical
// space (|u| is pointwise-invariant under the cubic flow), half free flow.
SpectralField step_strang(const SpectralField& u, const EquationSpec& spec, double dt,
                          const PhaseTables& tab, double kappa) {
    if (spec.form == EquationForm::gauged)
        throw std::invalid_argument(
            "integrator: split-step does not support the gauged form (time-dependent phases)");

    SpectralField mid = u;
    apply_table(mid, tab.half_fwd);

    double shift = 0.0;
    if (spec.form == EquationForm::renormalized) {
        double m = 0.0;
        const int cutoff = u.grid.cutoff();
        for (int n = -cutoff; n <= cutoff; ++n) m += std::norm(mid.at(n));
        shift = -2.0 * m; // fint-renormalization; invariant during the substep
    }
    std::vector<cplx> samples = synthesize(mid);
    for (cplx& s : samples) s *= std::polar(1.0, -kappa * dt * (std::norm(s) + shift));
    SpectralField rotated = analyze(u.grid, samples, mid.time);
    const int cutoff = u.grid.cutoff();
    for (int idx = 0; idx < u.grid.modes; ++idx)
        if (std::abs(u.grid.mode_at(idx)) > cutoff)
            rotated.coeffs[static_cast<std::size_t>(idx)] = 0.0;

    apply_table(rotated, tab.half_fwd);
    rotated.time = u.time + dt;
    return rotated;
}

SpectralField step_impl(const SpectralField& u, const EquationSpec& spec, double dt,
                        Scheme scheme, const PhaseTables& tab) {
    const double kappa = spec.coupling();
    SpectralField out = [&] {
        if (kappa == 0.0) { // pure free flow, bit-exact
            SpectralField z = u;
            apply_table(z, tab.full_fwd);
            z.time = u.time + dt;
            return z;
        }
        return scheme == Scheme::rk4_interaction ? step_rk4_ip(u, spec, dt, tab, kappa)
                                                 : step_strang(u, spec, dt, tab, kappa);
    }();
    guard(out, out.time);
    return out;
}

} // namespace

SpectralField step(const SpectralField& u, const EquationSpec& spec, double dt, Scheme scheme) {
    spec.validate(u.grid);
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const PhaseTables tab(u.grid, spec.alpha, dt);
    return step_impl(u, spec, dt, scheme, tab);
}

Trajectory run_from(const SpectralField& u0, const EquationSpec& spec,
                    const IntegratorSpec& integ,
                    const std::vector<NamedDiagnostic>& diagnostics) {
    spec.validate(u0.grid);
    integ.validate();
    const long n_steps = integ.steps();
    const PhaseTables tab(u0.grid, spec.alpha, integ.dt);

    Trajectory traj;
    for (const NamedDiagnostic& d : diagnostics) traj.diagnostic_names.push_back(d.name);

    auto store = [&](const SpectralField& u) {
        traj.times.push_back(u.time);
        traj.snapshots.push_back(u);
        std::vector<double> row;
        row.reserve(diagnostics.size());
        for (const NamedDiagnostic& d : diagnostics) row.push_back(d.eval(u));
        traj.diagnostic_rows.push_back(std::move(row));
    };

    SpectralField u = u0;
    guard(u, u.time);
    store(u);
    const double t0 = u0.time;

    if (spec.coupling() == 0.0) {
        // Free flow: evaluate phases from the initial data directly so mode
        // magnitudes stay exact to rounding no matter how many steps elapse.
        for (long s = integ.store_every; s <= n_steps; s += integ.store_every) {
            u = free_evolve(u0, integ.dt * s, spec.alpha);
            u.time = t0 + integ.dt * s;
            store(u);
        }
        return traj;
    }

    for (long s = 1; s <= n_steps; ++s) {
        try {
            u = step_impl(u, spec, integ.dt, integ.scheme, tab);
        } catch (const StepError& err) {
            traj.failure = StepFailure{err.time, err.what()};
            return traj;
        }
        u.time = t0 + integ.dt * s; // recurrence-free time keeps samples exactly aligned
        if (s % integ.store_every == 0) store(u);
    }
    return traj;
}

Trajectory run(const GridSpec& grid, const EquationSpec& spec, const IntegratorSpec& integ,
               const std::vector<NamedDiagnostic>& diagnostics) {
    return run_from(make_initial_data(grid, spec.initial_data), spec, integ, diagnostics);
}

} // namespace fnls
