#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "minlab/errors.hpp"
#include "minlab/experiments.hpp"
#include "minlab/forcing.hpp"
#include "minlab/omega.hpp"
#include "minlab/solver.hpp"

namespace py = pybind11;
using namespace minlab;

namespace {

struct Setup {
    SampleConfig cfg;
    PotentialBasis basis;
};

Setup make_setup(const std::string& basis, int grid, const std::string& dist,
                 const std::string& mode, double b, int winding, std::uint64_t seed) {
    Setup s{{}, make_fourier_basis(parse_basis_spec(basis), grid)};
    s.cfg.grid_size = grid;
    s.cfg.drift = b;
    s.cfg.winding_bound = winding;
    s.cfg.dist = parse_dist_spec(dist);
    s.cfg.mode = parse_mode_spec(mode);
    s.cfg.master_seed = seed;
    validate_config(s.cfg);
    return s;
}

py::dict fit_dict(const FitResult& fit) {
    py::dict d;
    d["lambda_hat"] = fit.lambda_hat;
    d["c_hat"] = fit.c_hat;
    d["r_squared"] = fit.r_squared;
    d["n_used"] = fit.n_used;
    d["burn_in"] = fit.burn_in;
    return d;
}

py::dict arc_dict(const CircleArc& arc) {
    py::dict d;
    d["lo"] = arc.lo;
    d["hi"] = arc.hi;
    d["length"] = arc.length;
    d["a"] = arc.a;
    d["b"] = arc.b;
    return d;
}

py::dict cert_dict(const SeparationCertificate& cert) {
    py::dict d;
    d["pass"] = cert.pass;
    d["failure"] = cert.failure;
    d["grid_size"] = cert.grid_size;
    d["coefficients"] = cert.coefficients;
    d["argmax"] = cert.argmax;
    d["peak"] = cert.peak;
    d["alpha0"] = cert.alpha0;
    d["alpha"] = cert.alpha;
    py::list J, I;
    for (const auto& arc : cert.J) J.append(arc_dict(arc));
    for (const auto& arc : cert.I) I.append(arc_dict(arc));
    d["J"] = J;
    d["I"] = I;
    return d;
}

SeparationCertificate cert_for(const Setup& s,
                               const std::vector<std::vector<double>>& candidates,
                               double alpha_request) {
    const auto cands =
        candidates.empty() ? auto_separation_candidates(s.basis) : candidates;
    return separation_check(s.basis, cands, alpha_request);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grid minimizer lab: Lax-Oleinik evolutions on the circle and the "
              "statistics built on them.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def(
        "evolve_values",
        [](const std::string& basis, int grid, const std::string& dist,
           const std::string& mode, double b, int winding, std::uint64_t seed,
           int steps, const std::vector<double>& psi) {
            const auto s = make_setup(basis, grid, dist, mode, b, winding, seed);
            KickSequence seq(seed, s.cfg.dist, s.cfg.mode, s.basis.count());
            BasisForcing forcing(seq, s.basis);
            const auto ev = evolve(forcing, 0, steps, s.cfg.solver(), psi);
            std::vector<std::vector<double>> rows(steps + 1,
                                                  std::vector<double>(grid));
            for (int n = 0; n <= steps; ++n)
                for (int x = 0; x < grid; ++x) rows[n][x] = ev.value(n, x);
            return rows;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("winding") = 2, py::arg("seed") = 0, py::arg("steps") = 1,
        py::arg("psi") = std::vector<double>{},
        "Value table of one evolution, rows[n][x] for n = 0..steps.");

    m.def(
        "source_sets",
        [](const std::string& basis, int grid, const std::string& dist,
           const std::string& mode, double b, int winding, std::uint64_t seed,
           std::int64_t horizon) {
            const auto s = make_setup(basis, grid, dist, mode, b, winding, seed);
            KickSequence seq(seed, s.cfg.dist, s.cfg.mode, s.basis.count());
            BasisForcing forcing(seq, s.basis);
            const int sub = s.cfg.mode.substeps;
            const auto ev =
                evolve(forcing, 0, static_cast<int>((1 + horizon) * sub),
                       s.cfg.solver());
            const auto table = shock_map(ev, sub, (1 + horizon) * sub);
            const auto omega = omega_set(ev, sub, (1 + horizon) * sub);
            py::dict d;
            d["terminal"] = table.terminal;
            std::vector<bool> shock(table.kind.size());
            for (std::size_t i = 0; i < table.kind.size(); ++i)
                shock[i] = table.kind[i] == ShockKind::Shock;
            d["shock"] = shock;
            d["sources"] = omega.points;
            d["diameter"] = diameter(omega);
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("winding") = 2, py::arg("seed") = 0, py::arg("horizon") = 1,
        "Backward map at the given horizon: terminal index and shock flag per "
        "point, plus the reachable source set and its diameter.");

    m.def(
        "decay",
        [](const std::string& basis, int grid, const std::string& dist,
           const std::string& mode, double b, int winding, std::uint64_t seed,
           int samples, const std::vector<std::int64_t>& horizons) {
            const auto s = make_setup(basis, grid, dist, mode, b, winding, seed);
            const auto series = decay_experiment(s.cfg, s.basis, samples, horizons);
            py::dict d;
            d["horizons"] = series.horizons;
            d["per_sample"] = series.per_sample;
            d["mean"] = series.mean;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("winding") = 2, py::arg("seed") = 0, py::arg("samples") = 200,
        py::arg("horizons") = std::vector<std::int64_t>{},
        "Source-set diameters per sample and horizon, with the sample mean.");

    m.def(
        "fit_log_linear",
        [](const std::vector<std::int64_t>& horizons, const std::vector<double>& means,
           int burn_in, double floor) {
            return fit_dict(fit_log_linear(horizons, means, burn_in, floor));
        },
        py::arg("horizons"), py::arg("means"), py::arg("burn_in") = 0,
        py::arg("floor") = 0.0,
        "Least-squares exponential fit of the mean series, skipping burn-in "
        "entries and entries at or below the floor.");

    m.def(
        "halving",
        [](const std::string& basis, int grid, const std::string& dist,
           const std::string& mode, double b, int winding, std::uint64_t seed,
           std::int64_t t, int trials, int pasts, std::int64_t base) {
            const auto s = make_setup(basis, grid, dist, mode, b, winding, seed);
            const auto est = halving_frequency(s.cfg, s.basis, t, trials, pasts, base);
            py::dict d;
            d["t_increment"] = est.t_increment;
            d["base_horizon"] = est.base_horizon;
            d["successes"] = est.successes;
            d["usable"] = est.usable;
            d["excluded"] = est.excluded;
            d["frequency"] = est.frequency;
            d["min_past_frequency"] = est.min_past_frequency;
            d["half_width"] = est.half_width;
            d["past_successes"] = est.past_successes;
            d["past_usable"] = est.past_usable;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("winding") = 2, py::arg("seed") = 0, py::arg("t") = 3,
        py::arg("trials") = 100, py::arg("pasts") = 10, py::arg("base") = 3,
        "Frequency of the source-set diameter halving over a window of length t.");

    m.def(
        "two_solution",
        [](const std::string& basis, int grid, const std::string& dist,
           const std::string& mode, double b, int winding, std::uint64_t seed,
           const std::vector<double>& psi1, const std::vector<double>& psi2,
           const std::vector<std::int64_t>& horizons) {
            const auto s = make_setup(basis, grid, dist, mode, b, winding, seed);
            const auto series =
                two_solution_convergence(s.cfg, s.basis, psi1, psi2, horizons);
            py::dict d;
            d["horizons"] = series.horizons;
            d["distance"] = series.distance;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("winding") = 2, py::arg("seed") = 0, py::arg("psi1"), py::arg("psi2"),
        py::arg("horizons") = std::vector<std::int64_t>{},
        "Hausdorff distance between the source sets of two initial conditions "
        "under one shared forcing.");

    m.def(
        "lyapunov",
        [](const std::string& basis, int grid, const std::string& dist,
           const std::string& mode, double b, int winding, std::uint64_t seed,
           int kicks) {
            const auto s = make_setup(basis, grid, dist, mode, b, winding, seed);
            const int sub = s.cfg.mode.substeps;
            KickSequence seq(seed, s.cfg.dist, s.cfg.mode, s.basis.count());
            BasisForcing forcing(seq, s.basis);
            const auto ev = evolve(forcing, 0, kicks * sub, s.cfg.solver());
            const auto path = backtrack(ev, 0);
            const auto r = lyapunov_exponent(path, seq, s.basis, 0);
            py::dict d;
            d["exponent"] = r.exponent;
            d["max_det_error"] = r.max_det_error;
            d["n_kicks"] = r.n_kicks;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("winding") = 2, py::arg("seed") = 0, py::arg("kicks") = 100,
        "Top exponent of the linearized dynamics along one backward minimizer.");

    m.def(
        "circle_hausdorff",
        [](const std::vector<int>& a, const std::vector<int>& b, int grid) {
            return circle_hausdorff(a, b, grid);
        },
        py::arg("a"), py::arg("b"), py::arg("grid"),
        "Hausdorff distance between two sets of grid indices, in circle units.");

    m.def(
        "separation",
        [](const std::string& basis, int grid,
           const std::vector<std::vector<double>>& candidates, double alpha) {
            const auto s =
                make_setup(basis, grid, "uniform:1", "kicked", 0.0, 2, 0);
            return cert_dict(cert_for(s, candidates, alpha));
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("candidates") = std::vector<std::vector<double>>{},
        py::arg("alpha") = 0.0,
        "Separation certificate for the candidate potentials; empty candidates "
        "select the three rotated cosines.");

    m.def(
        "proof_constants",
        [](const std::string& basis, int grid, const std::string& mode, double b,
           const std::vector<std::vector<double>>& candidates, double alpha) {
            const auto s = make_setup(basis, grid, "uniform:1", mode, b, 2, 0);
            const auto cert = cert_for(s, candidates, alpha);
            if (!cert.pass) throw ConfigError("separation failed: " + cert.failure);
            const auto pc = proof_constants(cert, s.basis, s.cfg.mode.mode, b);
            py::dict d;
            d["c1_norm_max"] = pc.c1_norm_max;
            d["C"] = pc.C;
            d["alpha"] = pc.alpha;
            d["n_prime"] = pc.n_prime;
            d["n_big"] = pc.n_big;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("mode") = "kicked", py::arg("b") = 0.0,
        py::arg("candidates") = std::vector<std::vector<double>>{},
        py::arg("alpha") = 0.0,
        "Certified margin alpha and the integer thresholds N' and N (decimal "
        "string) derived from a passing separation certificate.");

    m.def(
        "check_embedding",
        [](const std::string& basis, int grid, double tolerance) {
            const auto modes = parse_basis_spec(basis);
            const auto report =
                check_embedding(make_fourier_basis(modes, grid), tolerance);
            py::dict d;
            d["pass"] = report.pass;
            if (report.collision) {
                d["collision"] = py::make_tuple(report.collision->first,
                                                report.collision->second);
            }
            if (report.degenerate_point) d["degenerate_point"] = *report.degenerate_point;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("tolerance") = kEmbeddingTolerance,
        "Injectivity / immersion check of the coefficient-to-potential map on "
        "the grid.");

    m.def(
        "event_probability",
        [](const std::string& basis, int grid, const std::string& dist, double eps,
           int kicks, std::int64_t samples, std::uint64_t seed) {
            const auto modes = parse_basis_spec(basis);
            const auto est = event_probability(make_fourier_basis(modes, grid),
                                               parse_dist_spec(dist), eps, kicks,
                                               samples, seed);
            py::dict d;
            d["probability"] = est.probability;
            d["half_width"] = est.half_width;
            d["successes"] = est.successes;
            d["n_samples"] = est.n_samples;
            return d;
        },
        py::arg("basis") = "fourier:1c,1s", py::arg("grid") = 256,
        py::arg("dist") = "uniform:1", py::arg("eps") = 0.5, py::arg("kicks") = 1,
        py::arg("samples") = 10000, py::arg("seed") = 0,
        "Monte-Carlo probability that consecutive kick potentials all stay "
        "within sup-norm eps.");
}
