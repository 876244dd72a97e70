#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fnlslab/equation.hpp"
#include "fnlslab/imethod.hpp"
#include "fnlslab/integrator.hpp"
#include "fnlslab/spacetime.hpp"

namespace fnls {

// Outcome of a brute-force lemma check or estimate probe. worst_witness holds
// whatever tuple pins the extremal sample (frequencies, counts, or an
// ensemble member index); re-evaluating the witness through the matching
// *_ratio helper reproduces worst_ratio bit-for-bit.
struct BoundReport {
    std::string description;
    long long samples = 0;
    double worst_ratio = 0.0;
    std::vector<double> worst_witness;
    std::map<std::string, double> parameters;
    std::vector<std::string> notes;

    std::string to_text() const; // aligned columns, human-oriented
    std::string to_json() const; // machine form
};

// |phi| / (|xi1+xi2| |xi2+xi3| max|xi|^{alpha-2}) for one quadruple with
// xi1+xi2+xi3+xi4 = 0, xi1+xi2 != 0, xi2+xi3 != 0, where
// phi = |xi1|^a - |xi2|^a + |xi3|^a - |xi4|^a.
double resonance_ratio(double alpha, double x1, double x2, double x3, double x4);

// Exhaustive scan of the resonance lower bound over integer quadruples with
// |xi_j| <= range, reporting the minimal ratio and its witness. alpha = 2
// gives the exact algebraic value 2 (phi = -2(xi1+xi2)(xi2+xi3)); alpha > 1
// must give a strictly positive minimum (thrown otherwise).
BoundReport check_resonance_bound(double alpha, int range);

struct Interval {
    double lo;
    double hi;
};

// Counting bound: #{k in J cap Z : g(k) in I} <= |I| / inf_J |g'| + 1.
// The derivative floor may be supplied (analytic lower bound) or is bracketed
// on a fine grid. Throws when the floor degenerates (bound vacuous) or the
// count exceeds the bound. worst_ratio = count / bound, witness = {count,
// bound}.
BoundReport check_counting_lemma(const std::function<double(double)>& g, Interval range_i,
                                 Interval window_j,
                                 std::optional<double> derivative_floor = std::nullopt);

// Random ensembles for the estimate probes: free evolutions of rough random
// data — the linear-solution class the space-time estimates are tested on.
struct EnsembleSpec {
    GridSpec grid{32};
    double t_end = 2.0;
    int time_samples = 64; // power of two
    Taper window{};
    int size = 100;
    std::uint64_t seed = 1;
    double amplitude = 1.0;
    double gamma = 0.5; // spectral decay of the random draws

    void validate() const;
};

enum class LebesgueExponent { l4, l6 };

// Ratio ||u||_{L^p_{t,x}} / ||u||_X for an explicit space-time field, where
// the denominator is X^{0,b} for L^4 and X^{eps,b} (eps = 0.1) for L^6.
double strichartz_field_ratio(const SpaceTimeField& field, double alpha, double b,
                              LebesgueExponent p);

// Same ratio for ensemble member `member` (a free evolution of rough random
// data). `refine` dyadically doubles the space-time grid: same field, finer
// sampling.
double strichartz_ratio(double alpha, double b, LebesgueExponent p, const EnsembleSpec& ens,
                        int member, int refine = 0);

// Finite-constant probe of the L^4/L^6 Strichartz-type bounds: max of
// strichartz_ratio over the ensemble, plus a grid-doubling stability check on
// the extremal member (relative change recorded as parameters["doubling_change"],
// expected <= 0.2). Measures constants; proves nothing.
BoundReport probe_strichartz(double alpha, double b, LebesgueExponent p,
                             const EnsembleSpec& ens);

enum class TrilinearForm { line, circle };

// Ratio ||T(u1,u2,u3)||_{X^{s,-1/2+2eps}} / prod ||u_j||_{X^{s,1/2+eps}}
// (eps = 0.1) for explicit fields; T is the pointwise product u1 conj(u2) u3
// (line) or the phased nonresonant sum over n1 != n2, n2 != n3 with gauge
// phases from `reference` (circle; reference required there).
double trilinear_field_ratio(const SpaceTimeField& a, const SpaceTimeField& b,
                             const SpaceTimeField& c, const SpectralField* reference,
                             double alpha, double s, TrilinearForm form);

// Same ratio for ensemble member `member` (three independent free evolutions;
// the circle reference is the first field's initial spectrum).
double trilinear_ratio(double alpha, double s, TrilinearForm form, const EnsembleSpec& ens,
                       int member);

// Trilinear-estimate probe: ensemble max of trilinear_ratio, plus the
// high-high-high concentration family (three modes packed at frequency 2^k,
// k = 3..6) whose ratios are recorded as parameters["concentration_ratio_k<k>"].
// Below the well-posedness threshold the concentration ratios are expected to
// grow with k (trend, not a rate); a note marks sub-threshold calls.
BoundReport probe_trilinear(double alpha, double s, TrilinearForm form,
                            const EnsembleSpec& ens);

enum class SweepVariant { line, torus };

// N-dependence of the corrected-mass increment along one fixed trajectory.
struct ScalingReport {
    std::vector<double> Ns;
    std::vector<double> decrements; // sup_{stored t} |M4(t) - M4(0)| per N
    double fitted_slope = 0.0;      // least squares on log2/log2
    double theory_exponent = 0.0;
    double residual = 0.0; // rms log2 fit residual
    std::string manifest_ref = "(in-memory)";
    bool monotone = true;           // decrement nonincreasing in N (noise floor applied)
    bool slope_within_margin = true; // fitted_slope <= theory_exponent + slack
    double snapshot_interval = 0.0;
    std::map<std::string, double> parameters;
    std::vector<std::string> notes;

    std::string to_text() const;
    std::string to_json() const;
    std::string to_csv() const; // N, decrement, log2 columns
    std::string gnuplot_script(const std::string& csv_name) const;
};

// Runs (or reuses) one trajectory of `spec`, then for each dyadic N in `Ns`
// measures sup over stored snapshots of |M4(t) - M4(0)| with the smoothing
// threshold N (torus variant: mass-adapted multiplier with M = N^2 and gauge
// phases from the initial spectrum; line variant: plain power-law multiplier,
// no phases). Fits log2(decrement) against log2(N). Theory exponents:
// line -2 alpha + 2, torus max{-(3/2) alpha + 2 - 6s, -alpha - 6s}; slope
// violations and non-monotonicity are flagged in the report, not thrown.
// Zero coupling must give round-off decrements at every N.
ScalingReport sweep_almost_conservation(const GridSpec& grid, const EquationSpec& spec,
                                        const IntegratorSpec& integ,
                                        const std::vector<double>& Ns, SweepVariant variant,
                                        double s, double slack = 1.0);

} // namespace fnls
