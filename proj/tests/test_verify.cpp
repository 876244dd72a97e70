#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "fnlslab/random_data.hpp"
#include "fnlslab/reductions.hpp"
#include "fnlslab/verify.hpp"

using namespace fnls;

TEST_CASE("resonance lower bound: alpha = 2 is the exact algebraic control") {
    // phi = -2 (xi1+xi2)(xi2+xi3) at alpha = 2, so every admissible integer
    // quadruple has ratio exactly 2.
    CHECK(resonance_ratio(2.0, 3.0, -1.0, 4.0, -6.0) == 2.0);
    CHECK(resonance_ratio(2.0, 17.0, 5.0, -9.0, -13.0) == 2.0);

    const BoundReport report = check_resonance_bound(2.0, 16);
    CHECK(std::abs(report.worst_ratio - 2.0) <= 1e-12);
    CHECK(report.samples > 0);
}

TEST_CASE("resonance lower bound: positive minimum and reproducible witness") {
    for (const double alpha : {2.5, 3.0, 4.0}) {
        const BoundReport report = check_resonance_bound(alpha, 12);
        CHECK(report.worst_ratio > 0.0);
        REQUIRE(report.worst_witness.size() == 4);
        // The witness re-evaluates to the reported ratio bit for bit.
        const double again = resonance_ratio(alpha, report.worst_witness[0],
                                             report.worst_witness[1], report.worst_witness[2],
                                             report.worst_witness[3]);
        CHECK(again == report.worst_ratio);
        CHECK(report.parameters.at("alpha") == alpha);
        CHECK(report.parameters.at("range") == 12.0);
    }
    CHECK_THROWS_AS(check_resonance_bound(1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(check_resonance_bound(3.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(check_resonance_bound(3.0, 4096), std::invalid_argument);
}

TEST_CASE("resonance scan is independent of the worker count") {
    const int before = global_jobs.load();
    global_jobs.store(1);
    const BoundReport serial = check_resonance_bound(3.0, 10);
    global_jobs.store(4);
    const BoundReport threaded = check_resonance_bound(3.0, 10);
    global_jobs.store(before);
    CHECK(serial.worst_ratio == threaded.worst_ratio);
    CHECK(serial.worst_witness == threaded.worst_witness);
    CHECK(serial.samples == threaded.samples);
}

TEST_CASE("counting bound: equality case, empty window, violations") {
    // g(x) = x, I = [0, 10], J = [0, 10]: 11 integers against bound 10/1 + 1.
    const auto identity = [](double x) { return x; };
    const BoundReport tight = check_counting_lemma(identity, {0.0, 10.0}, {0.0, 10.0}, 1.0);
    CHECK(tight.worst_ratio == 1.0);
    CHECK(tight.worst_witness == std::vector<double>{11.0, 11.0});

    // No integers inside the window: count 0.
    const BoundReport empty = check_counting_lemma(identity, {0.0, 1.0}, {5.2, 5.8}, 1.0);
    CHECK(empty.worst_ratio == 0.0);

    // A claimed floor that is too large turns the true count into a violation.
    const auto flat = [](double x) { return 0.01 * x; };
    CHECK_THROWS_AS(check_counting_lemma(flat, {0.0, 0.1}, {0.0, 10.0}, 1.0),
                    std::runtime_error);

    // Bracketing the derivative of a function with an interior critical point
    // degenerates the floor; the bound is vacuous and must be rejected.
    const auto parabola = [](double x) { return (x - 5.0) * (x - 5.0); };
    CHECK_THROWS_AS(check_counting_lemma(parabola, {0.0, 25.0}, {0.0, 10.0}),
                    std::invalid_argument);

    // Windows with absurdly many integers are rejected.
    CHECK_THROWS_AS(check_counting_lemma(identity, {0.0, 1.0}, {0.0, 2e7}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("counting bound: bracketed floor on the dispersive phase") {
    // g(x) = tau - |x|^alpha + |n - x|^alpha on [n/2, n] has |g'| bounded below
    // by alpha (n/2)^{alpha-1}; the bracketed floor must not fall below it by
    // more than the bracketing slack, and the count must obey the bound.
    const double alpha = 2.5;
    const double n = 32.0;
    const double tau = 100.0;
    const auto g = [&](double x) {
        return tau - std::pow(std::abs(x), alpha) + std::pow(std::abs(n - x), alpha);
    };
    const BoundReport report = check_counting_lemma(g, {-1.0, 1.0}, {n / 2.0, n});
    CHECK(report.worst_ratio <= 1.0);
    const double analytic = alpha * std::pow(n / 2.0, alpha - 1.0);
    CHECK(report.parameters.at("derivative_floor") >= 0.5 * analytic);
}

TEST_CASE("ensemble spec validation") {
    EnsembleSpec ens;
    ens.size = 0;
    CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
    ens.size = 100;
    ens.time_samples = 48;
    CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
    ens.time_samples = 64;
    ens.t_end = -1.0;
    CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
    ens.t_end = 2.0;
    CHECK_NOTHROW(ens.validate());
}

TEST_CASE("strichartz ratio: unimodular and scaling invariance, determinism") {
    const GridSpec g(32);
    SpaceTimeField F(g, 2.0, 32);
    Rng rng(5);
    for (int j = 0; j < 32; ++j)
        for (int idx = 0; idx < g.modes; ++idx) F.at(j, g.mode_at(idx)) = rng.complex_normal();

    const double base = strichartz_field_ratio(F, 3.0, 1.0 / 3.0, LebesgueExponent::l4);
    CHECK(base > 0.0);

    SpaceTimeField rotated = F;
    for (cplx& v : rotated.values) v *= std::polar(1.0, 0.9);
    const double rot = strichartz_field_ratio(rotated, 3.0, 1.0 / 3.0, LebesgueExponent::l4);
    CHECK(std::abs(rot - base) <= 1e-12 * base);

    SpaceTimeField scaled = F;
    for (cplx& v : scaled.values) v *= 7.5;
    const double sc = strichartz_field_ratio(scaled, 3.0, 1.0 / 3.0, LebesgueExponent::l4);
    CHECK(std::abs(sc - base) <= 1e-12 * base);

    EnsembleSpec ens;
    ens.grid = GridSpec(32);
    ens.size = 100;
    const double r1 = strichartz_ratio(3.0, 1.0 / 3.0, LebesgueExponent::l4, ens, 17);
    const double r2 = strichartz_ratio(3.0, 1.0 / 3.0, LebesgueExponent::l4, ens, 17);
    CHECK(r1 == r2);
    CHECK_THROWS_AS(strichartz_ratio(3.0, 1.0 / 3.0, LebesgueExponent::l4, ens, 100),
                    std::invalid_argument);
}

TEST_CASE("strichartz probe: witness reproduces the extremal ratio") {
    EnsembleSpec ens;
    ens.grid = GridSpec(32);
    ens.size = 100;
    ens.time_samples = 32;

    const BoundReport report = probe_strichartz(3.0, 1.0 / 3.0, LebesgueExponent::l4, ens);
    CHECK(report.samples == 100);
    REQUIRE(report.worst_witness.size() == 1);
    const int member = static_cast<int>(report.worst_witness[0]);
    CHECK(strichartz_ratio(3.0, 1.0 / 3.0, LebesgueExponent::l4, ens, member) ==
          report.worst_ratio);
    CHECK(report.parameters.count("doubling_change") == 1);
    CHECK(report.parameters.at("doubling_change") <= 0.2);
    bool taper_note = false;
    for (const std::string& n : report.notes) taper_note |= n.find("taper") != std::string::npos;
    CHECK(taper_note);

    EnsembleSpec small = ens;
    small.size = 10;
    CHECK_THROWS_AS(probe_strichartz(3.0, 1.0 / 3.0, LebesgueExponent::l4, small),
                    std::invalid_argument);
}

TEST_CASE("trilinear ratio: forms, determinism, and degenerate input") {
    EnsembleSpec ens;
    ens.grid = GridSpec(32);
    ens.size = 100;
    ens.time_samples = 32;

    const double s = lwp_threshold(3.0, Domain::circle);
    const double line1 = trilinear_ratio(3.0, s, TrilinearForm::line, ens, 3);
    const double line2 = trilinear_ratio(3.0, s, TrilinearForm::line, ens, 3);
    CHECK(line1 == line2);
    CHECK(line1 > 0.0);
    const double circ = trilinear_ratio(3.0, s, TrilinearForm::circle, ens, 3);
    CHECK(circ > 0.0);

    // The zero field cannot be normalized.
    SpaceTimeField zero(ens.grid, 2.0, 32);
    CHECK_THROWS_AS(
        trilinear_field_ratio(zero, zero, zero, nullptr, 3.0, s, TrilinearForm::line),
        std::invalid_argument);
    SpaceTimeField one(ens.grid, 2.0, 32);
    one.at(0, 1) = 1.0;
    CHECK_THROWS_AS(
        trilinear_field_ratio(one, one, one, nullptr, 3.0, s, TrilinearForm::circle),
        std::invalid_argument);
}

TEST_CASE("trilinear probe: concentration family grows below the threshold") {
    EnsembleSpec ens;
    ens.grid = GridSpec(128);
    ens.size = 100;
    ens.time_samples = 32;

    const double threshold = lwp_threshold(3.0, Domain::circle);
    const BoundReport report =
        probe_trilinear(3.0, threshold - 0.25, TrilinearForm::circle, ens);

    // cutoff(128) = 42 admits k = 3..5 and rejects k = 6.
    CHECK(report.parameters.count("concentration_ratio_k3") == 1);
    CHECK(report.parameters.count("concentration_ratio_k5") == 1);
    CHECK(report.parameters.count("concentration_ratio_k6") == 0);
    bool skip_note = false, growth_note = false;
    for (const std::string& n : report.notes) {
        skip_note |= n.find("k=6 skipped") != std::string::npos;
        growth_note |= n.find("expected to grow") != std::string::npos;
    }
    CHECK(skip_note);
    CHECK(growth_note);
    // Monotone growth of the packed-mode ratio as the frequency doubles.
    CHECK(report.parameters.at("concentration_ratio_k4") >
          report.parameters.at("concentration_ratio_k3"));
    CHECK(report.parameters.at("concentration_ratio_k5") >
          report.parameters.at("concentration_ratio_k4"));
    // The time grid was refined to resolve the combination frequencies.
    CHECK(report.parameters.at("concentration_time_samples_k5") >
          report.parameters.at("concentration_time_samples_k3"));

    REQUIRE(report.worst_witness.size() == 1);
    const int member = static_cast<int>(report.worst_witness[0]);
    CHECK(trilinear_ratio(3.0, threshold - 0.25, TrilinearForm::circle, ens, member) ==
          report.worst_ratio);
}

TEST_CASE("report serialization: text, json, csv, plot script") {
    BoundReport rep;
    rep.description = "demo";
    rep.samples = 3;
    rep.worst_ratio = 0.5;
    rep.worst_witness = {1.0, 2.0};
    rep.parameters["alpha"] = 3.0;
    rep.notes.push_back("note one");
    CHECK(rep.to_text().find("demo") != std::string::npos);
    const auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j["worst_ratio"].get<double>() == 0.5);
    CHECK(j["parameters"]["alpha"].get<double>() == 3.0);
    CHECK(j["notes"].size() == 1);

    ScalingReport sr;
    sr.Ns = {4.0, 8.0};
    sr.decrements = {1e-3, 2.5e-4};
    sr.fitted_slope = -2.0;
    sr.theory_exponent = -1.5;
    sr.parameters["alpha"] = 3.0;
    const std::string csv = sr.to_csv();
    CHECK(csv.find("N,decrement,log2_N,log2_decrement\r\n") == 0);
    CHECK(csv.find("\r\n4,") != std::string::npos);
    const auto sj = nlohmann::json::parse(sr.to_json());
    CHECK(sj["fitted_slope"].get<double>() == -2.0);
    CHECK(sj["decrements"].size() == 2);
    const std::string gp = sr.gnuplot_script("sweep.csv");
    CHECK(gp.find("logscale") != std::string::npos);
    CHECK(gp.find("sweep.csv") != std::string::npos);
    CHECK(sr.to_text().find("almost-conservation sweep") == 0);
}

TEST_CASE("sweep: free flow sits at the round-off floor") {
    const GridSpec g(32);
    EquationSpec spec;
    spec.alpha = 3.0;
    spec.form = EquationForm::renormalized;
    spec.linearized = true;
    spec.initial_data = {.kind = InitialDataSpec::Kind::rough, .amplitude = 1.0,
                         .n0 = 4.0, .phi0 = 0.0, .gamma = 0.5, .seed = 2, .coefficients = {}};
    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-3, .t_end = 0.1, .store_every = 20};

    const ScalingReport line = sweep_almost_conservation(g, spec, integ, {4.0, 8.0, 16.0, 32.0},
                                                         SweepVariant::line, -0.25);
    for (const double d : line.decrements) CHECK(d <= 1e-12);
    CHECK(line.fitted_slope == 0.0);
    CHECK(line.monotone);
    CHECK(line.slope_within_margin);
    bool floor_note = false;
    for (const std::string& n : line.notes)
        floor_note |= n.find("round-off floor") != std::string::npos;
    CHECK(floor_note);

    EquationSpec gauged = spec;
    gauged.form = EquationForm::gauged;
    gauged.reference_data.reset(); // the sweep builds it from initial_data
    const ScalingReport torus = sweep_almost_conservation(g, gauged, integ, {4.0, 8.0, 16.0, 32.0},
                                                          SweepVariant::torus, -1.0 / 6.0);
    for (const double d : torus.decrements) CHECK(d <= 1e-12);
    CHECK(torus.theory_exponent == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("sweep: input validation") {
    const GridSpec g(32);
    EquationSpec spec;
    spec.alpha = 3.0;
    spec.form = EquationForm::renormalized;
    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-3, .t_end = 0.01, .store_every = 10};

    CHECK_THROWS_AS(sweep_almost_conservation(g, spec, integ, {4.0, 8.0, 16.0},
                                               SweepVariant::line, -0.25),
                    std::invalid_argument); // fewer than four thresholds
    CHECK_THROWS_AS(sweep_almost_conservation(g, spec, integ, {4.0, 6.0, 8.0, 16.0},
                                               SweepVariant::line, -0.25),
                    std::invalid_argument); // 6 is not dyadic
    CHECK_THROWS_AS(sweep_almost_conservation(g, spec, integ, {4.0, 8.0, 32.0, 16.0},
                                               SweepVariant::line, -0.25),
                    std::invalid_argument); // not increasing
    CHECK_THROWS_AS(sweep_almost_conservation(g, spec, integ, {4.0, 8.0, 16.0, 32.0},
                                               SweepVariant::torus, -0.25),
                    std::invalid_argument); // torus needs the gauged form
    EquationSpec gauged = spec;
    gauged.form = EquationForm::gauged;
    CHECK_THROWS_AS(sweep_almost_conservation(g, gauged, integ, {4.0, 8.0, 16.0, 32.0},
                                               SweepVariant::line, -0.25),
                    std::invalid_argument); // line variant excludes the gauged form
}

TEST_CASE("sweep: theory exponents for both families") {
    const GridSpec g(32);
    EquationSpec spec;
    spec.alpha = 3.0;
    spec.sign = Sign::focusing;
    spec.form = EquationForm::gauged;
    spec.initial_data = {.kind = InitialDataSpec::Kind::rough, .amplitude = 0.4,
                         .n0 = 4.0, .phi0 = 0.0, .gamma = 0.5, .seed = 3, .coefficients = {}};
    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-3, .t_end = 0.1, .store_every = 50};

    // torus: max{-(3/2) alpha + 2 - 6s, -alpha - 6s} at s = -1/6 gives -1.5.
    const ScalingReport torus = sweep_almost_conservation(g, spec, integ, {4.0, 8.0, 16.0, 32.0},
                                                          SweepVariant::torus, -1.0 / 6.0);
    CHECK(torus.theory_exponent == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(torus.parameters.count("exponent_candidate_a") == 1);
    CHECK(torus.parameters.count("exponent_candidate_b") == 1);
    CHECK(torus.snapshot_interval == doctest::Approx(0.05).epsilon(1e-12));

    // line: -2 alpha + 2.
    EquationSpec line_spec = spec;
    line_spec.form = EquationForm::original;
    const ScalingReport line = sweep_almost_conservation(g, line_spec, integ, {4.0, 8.0, 16.0, 32.0},
                                                         SweepVariant::line, -0.25);
    CHECK(line.theory_exponent == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(line.decrements.size() == 4);
    CHECK(line.decrements[0] > 0.0);
}
