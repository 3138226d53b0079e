#include "minlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "minlab/errors.hpp"
#include "minlab/omega.hpp"
#include "minlab/oracle.hpp"
#include "minlab/rng.hpp"
#include "minlab/solver.hpp"

namespace minlab {

namespace {

using nlohmann::json;

std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fixed12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& value,
                       std::int64_t lo, std::int64_t hi) {
    std::int64_t out = 0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size())
        throw ConfigError("bad integer for '" + key + "': " + value);
    if (out < lo || out > hi)
        throw ConfigError("'" + key + "' out of range: " + value);
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size())
        throw ConfigError("bad integer for '" + key + "': " + value);
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double out = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(out))
        throw ConfigError("bad number for '" + key + "': " + value);
    return out;
}

std::pair<std::int64_t, std::int64_t> parse_horizon_range(const std::string& value) {
    const auto dots = value.find("..");
    if (dots == std::string::npos)
        throw ConfigError("horizons must look like A..B, got '" + value + "'");
    const auto lo = parse_int("horizons", trim(value.substr(0, dots)), 0, 1000000);
    const auto hi =
        parse_int("horizons", trim(value.substr(dots + 2)), 0, 1000000);
    if (hi < lo) throw ConfigError("horizons range is reversed: " + value);
    return {lo, hi};
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = cfg.out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot open output file " + path);
    return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
    auto out = open_out(cfg, name);
    out << j.dump(2) << '\n';
}

json arc_json(const CircleArc& arc) {
    return json{{"lo", arc.lo},
                {"hi", arc.hi},
                {"length", arc.length},
                {"a", arc.a},
                {"b", arc.b}};
}

json certificate_json(const SeparationCertificate& cert) {
    json j;
    j["pass"] = cert.pass;
    j["failure"] = cert.failure;
    j["grid"] = cert.grid_size;
    j["coefficients"] = cert.coefficients;
    j["argmax"] = cert.argmax;
    j["x"] = cert.peak;
    j["alpha0"] = cert.alpha0;
    j["alpha"] = cert.alpha;
    j["J"] = json::array();
    j["I"] = json::array();
    for (const auto& arc : cert.J) j["J"].push_back(arc_json(arc));
    for (const auto& arc : cert.I) j["I"].push_back(arc_json(arc));
    return j;
}

FitResult fit_with_note(const RunConfig& cfg, const DecaySeries& series,
                        std::string* note) {
    const auto fit = fit_lambda(series, cfg.effective_burn_in());
    if (std::fabs(fit.lambda_hat) < 1e-9) *note = "no-decay";
    return fit;
}

json fit_json(const FitResult& fit, int n_samples, const std::string& note) {
    json j;
    j["lambda_hat"] = fit.lambda_hat;
    j["C_hat"] = fit.c_hat;
    j["r_squared"] = fit.r_squared;
    j["n_samples"] = n_samples;
    j["burn_in"] = fit.burn_in;
    j["n_used"] = fit.n_used;
    if (!note.empty()) j["note"] = note;
    return j;
}

void print_fit(std::ostream& log, const FitResult& fit, const std::string& note) {
    log << "lambda_hat=" << shortest(fit.lambda_hat)
        << " C_hat=" << shortest(fit.c_hat)
        << " r_squared=" << shortest(fit.r_squared) << " n_used=" << fit.n_used;
    if (!note.empty()) log << " (" << note << ")";
    log << '\n';
}

}  // namespace

std::vector<std::int64_t> RunConfig::horizons() const {
    if (horizon_lo < 0 || horizon_hi < horizon_lo)
        throw ConfigError("horizon range is empty or negative");
    std::vector<std::int64_t> hs;
    for (std::int64_t h = horizon_lo; h <= horizon_hi; ++h) hs.push_back(h);
    return hs;
}

int RunConfig::effective_burn_in() const {
    if (burn_in >= 0) return burn_in;
    return static_cast<int>((horizon_hi - horizon_lo + 1) / 5);
}

SampleConfig RunConfig::sample() const {
    SampleConfig cfg;
    cfg.grid_size = grid_size;
    cfg.drift = drift;
    cfg.winding_bound = winding_bound;
    cfg.dist = dist;
    cfg.mode = mode;
    cfg.master_seed = master_seed;
    return cfg;
}

PotentialBasis RunConfig::basis() const {
    return make_fourier_basis(parse_basis_spec(basis_spec), grid_size);
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        if (!seen.insert(key).second)
            throw ConfigError("repeated config key '" + key + "'");

        if (key == "basis") {
            parse_basis_spec(value);  // validate now, fail before computing
            cfg.basis_spec = value;
        } else if (key == "dist") {
            cfg.dist = parse_dist_spec(value);
        } else if (key == "mode") {
            cfg.mode = parse_mode_spec(value);
        } else if (key == "grid") {
            cfg.grid_size = static_cast<int>(parse_int(key, value, 2, 1 << 20));
        } else if (key == "b") {
            cfg.drift = parse_real(key, value);
        } else if (key == "winding") {
            cfg.winding_bound = static_cast<int>(parse_int(key, value, 1, 64));
        } else if (key == "seed") {
            cfg.master_seed = parse_u64(key, value);
        } else if (key == "samples") {
            cfg.n_samples = static_cast<int>(parse_int(key, value, 1, 100000000));
        } else if (key == "horizons") {
            std::tie(cfg.horizon_lo, cfg.horizon_hi) = parse_horizon_range(value);
        } else if (key == "burn_in") {
            cfg.burn_in = value == "auto"
                              ? -1
                              : static_cast<int>(parse_int(key, value, 0, 1000000));
        } else if (key == "t_halving") {
            cfg.t_halving = parse_int(key, value, 0, 1000000);
        } else if (key == "halving_pasts") {
            cfg.halving_pasts = static_cast<int>(parse_int(key, value, 1, 1000000));
        } else if (key == "halving_base") {
            cfg.halving_base = parse_int(key, value, 0, 1000000);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "basis = " << cfg.basis_spec << '\n';
    out << "dist = " << format_dist_spec(cfg.dist) << '\n';
    out << "mode = " << format_mode_spec(cfg.mode) << '\n';
    out << "grid = " << cfg.grid_size << '\n';
    out << "b = " << shortest(cfg.drift) << '\n';
    out << "winding = " << cfg.winding_bound << '\n';
    out << "seed = " << cfg.master_seed << '\n';
    out << "samples = " << cfg.n_samples << '\n';
    out << "horizons = " << cfg.horizon_lo << ".." << cfg.horizon_hi << '\n';
    if (cfg.burn_in < 0)
        out << "burn_in = auto\n";
    else
        out << "burn_in = " << cfg.burn_in << '\n';
    out << "t_halving = " << cfg.t_halving << '\n';
    out << "halving_pasts = " << cfg.halving_pasts << '\n';
    out << "halving_base = " << cfg.halving_base << '\n';
    out << "out = " << cfg.out_dir << '\n';
    return out.str();
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.seed) cfg.master_seed = *ov.seed;
    if (ov.out) cfg.out_dir = *ov.out;
    if (ov.samples) {
        if (*ov.samples < 1) throw ConfigError("--samples must be positive");
        cfg.n_samples = *ov.samples;
    }
    if (ov.grid) {
        if (*ov.grid < 2) throw ConfigError("--grid must be at least 2");
        cfg.grid_size = *ov.grid;
    }
    if (ov.sigma) {
        if (!(*ov.sigma >= 0.0)) throw ConfigError("--sigma must not be negative");
        cfg.dist.sigma = *ov.sigma;
    }
    if (ov.b) cfg.drift = *ov.b;
    if (ov.mode) cfg.mode = parse_mode_spec(*ov.mode);
    if (ov.horizons)
        std::tie(cfg.horizon_lo, cfg.horizon_hi) = parse_horizon_range(*ov.horizons);
    if (ov.t_halving) {
        if (*ov.t_halving < 0) throw ConfigError("--t-halving must not be negative");
        cfg.t_halving = *ov.t_halving;
    }
    if (ov.basis) {
        parse_basis_spec(*ov.basis);
        cfg.basis_spec = *ov.basis;
    }
}

int run_decay(const RunConfig& cfg, std::ostream& log) {
    const auto basis = cfg.basis();
    const auto hs = cfg.horizons();
    const auto series = decay_experiment(cfg.sample(), basis, cfg.n_samples, hs);

    {
        auto out = open_out(cfg, "decay.csv");
        out << "sample,horizon,diameter\n";
        for (int j = 0; j < series.n_samples(); ++j)
            for (std::size_t h = 0; h < hs.size(); ++h)
                out << j << ',' << hs[h] << ',' << fixed12(series.per_sample[j][h])
                    << '\n';
    }

    // Shock-map tables of the first sample, one block per horizon.
    {
        const auto scfg = cfg.sample();
        KickSequence seq(rng::derive_key(scfg.master_seed, 0), scfg.dist, scfg.mode,
                         basis.count());
        BasisForcing forcing(seq, basis);
        const int sub = scfg.mode.substeps;
        const auto ev =
            evolve(forcing, 0, static_cast<int>((1 + hs.back()) * sub), scfg.solver());
        auto out = open_out(cfg, "omega.csv");
        out << "t_minus_s,point_index,terminal_index,kind\n";
        for (const auto h : hs) {
            const auto table = shock_map(ev, sub, (1 + h) * sub);
            for (int y = 0; y < cfg.grid_size; ++y)
                out << h << ',' << y << ',' << table.terminal[y] << ','
                    << (table.kind[y] == ShockKind::Minimizer ? "minimizer" : "shock")
                    << '\n';
        }
    }

    std::string note;
    const auto fit = fit_with_note(cfg, series, &note);
    write_json(cfg, "fit.json", fit_json(fit, cfg.n_samples, note));
    print_fit(log, fit, note);
    return 0;
}

int run_fit(const RunConfig& cfg, std::ostream& log) {
    const auto path = cfg.out_dir + "/decay.csv";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path + " (run decay first)");

    std::string line;
    if (!std::getline(in, line) || trim(line) != "sample,horizon,diameter")
        throw ConfigError(path + " has an unexpected header");

    std::vector<std::int64_t> horizons;
    std::vector<double> sums;
    int n_samples = 0;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ConfigError(path + " has a malformed row: " + line);
        const int sample =
            static_cast<int>(parse_int("sample", line.substr(0, c1), 0, 100000000));
        const auto horizon =
            parse_int("horizon", line.substr(c1 + 1, c2 - c1 - 1), 0, 1000000);
        const double diameter = parse_real("diameter", line.substr(c2 + 1));
        if (sample == 0) {
            horizons.push_back(horizon);
            sums.push_back(diameter);
        } else {
            const std::size_t col = static_cast<std::size_t>(
                std::find(horizons.begin(), horizons.end(), horizon) -
                horizons.begin());
            if (col >= horizons.size())
                throw ConfigError(path + " row has an unknown horizon: " + line);
            sums[col] += diameter;
        }
        n_samples = std::max(n_samples, sample + 1);
    }
    if (horizons.empty()) throw ConfigError(path + " contains no data rows");
    std::vector<double> means(sums);
    for (auto& v : means) v /= n_samples;

    const auto fit = fit_log_linear(horizons, means, cfg.effective_burn_in(),
                                    2.0 / cfg.grid_size);
    std::string note;
    if (std::fabs(fit.lambda_hat) < 1e-9) note = "no-decay";
    write_json(cfg, "fit.json", fit_json(fit, n_samples, note));
    print_fit(log, fit, note);
    return 0;
}

int run_halving(const RunConfig& cfg, std::ostream& log) {
    const auto basis = cfg.basis();
    const auto est = halving_frequency(cfg.sample(), basis, cfg.t_halving,
                                       cfg.n_samples, cfg.halving_pasts,
                                       cfg.halving_base);
    json j;
    j["T"] = est.t_increment;
    j["frequency"] = est.frequency;
    j["excluded"] = est.excluded;
    j["confidence"] = est.half_width;
    j["usable"] = est.usable;
    j["min_past_frequency"] = est.min_past_frequency;
    j["base_horizon"] = est.base_horizon;
    write_json(cfg, "halving.json", j);
    log << "T=" << est.t_increment << " frequency=" << shortest(est.frequency)
        << " usable=" << est.usable << " excluded=" << est.excluded
        << " min_past=" << shortest(est.min_past_frequency) << '\n';
    return 0;
}

int run_convergence(const RunConfig& cfg, std::ostream& log) {
    const auto basis = cfg.basis();
    const auto hs = cfg.horizons();
    std::vector<double> psi1(cfg.grid_size, 0.0);
    std::vector<double> psi2(cfg.grid_size);
    for (int x = 0; x < cfg.grid_size; ++x)
        psi2[x] = std::cos(2.0 * M_PI * x / cfg.grid_size);

    const auto series = two_solution_convergence(cfg.sample(), basis, psi1, psi2, hs);
    auto out = open_out(cfg, "convergence.csv");
    out << "horizon,distance\n";
    for (std::size_t h = 0; h < hs.size(); ++h)
        out << hs[h] << ',' << fixed12(series.distance[h]) << '\n';

    const double last = series.distance.back();
    log << "final_distance=" << shortest(last) << " at horizon " << hs.back()
        << (last < 2.0 / cfg.grid_size ? " (collapsed)" : "") << '\n';
    return 0;
}

int run_lyapunov(const RunConfig& cfg, std::ostream& log) {
    const auto basis = cfg.basis();
    const int steps = static_cast<int>(cfg.horizon_hi * cfg.mode.substeps);
    if (steps < 10) throw ConfigError("lyapunov needs a horizon of at least 10 kicks");

    KickSequence seq(cfg.master_seed, cfg.dist, cfg.mode, basis.count());
    BasisForcing forcing(seq, basis);
    const auto ev = evolve(forcing, 0, steps, cfg.sample().solver());

    {
        auto out = open_out(cfg, "values.csv");
        out << "time,index,value\n";
        for (int n = 0; n <= steps; ++n)
            for (int x = 0; x < cfg.grid_size; ++x)
                out << n << ',' << x << ',' << fixed12(ev.value(n, x)) << '\n';
    }

    const auto path = backtrack(ev, 0);
    const auto r = lyapunov_exponent(path, seq, basis, 0);
    json j;
    j["exponent"] = r.exponent;
    j["max_det_error"] = r.max_det_error;
    j["n_kicks"] = r.n_kicks;
    write_json(cfg, "lyapunov.json", j);
    log << "exponent=" << shortest(r.exponent)
        << " max_det_error=" << shortest(r.max_det_error) << " n_kicks=" << r.n_kicks
        << '\n';
    return 0;
}

int run_separation(const RunConfig& cfg, bool auto3, std::ostream& log) {
    if (!auto3)
        throw ConfigError("separation requires --auto3 (rotated cosine triple)");
    const auto basis = cfg.basis();
    const auto cert = separation_check(basis, auto_separation_candidates(basis));
    write_json(cfg, "certificate.json", certificate_json(cert));
    if (!cert.pass) {
        log << "separation failed: " << cert.failure << '\n';
        return 1;
    }
    log << "pass alpha0=" << shortest(cert.alpha0) << " alpha=" << shortest(cert.alpha)
        << '\n';
    return 0;
}

int run_embed(const RunConfig& cfg, std::ostream& log) {
    const auto report = check_embedding(cfg.basis());
    if (report.pass) {
        log << "embedding ok\n";
        return 0;
    }
    if (report.collision)
        log << "not an embedding: grid points " << report.collision->first << " and "
            << report.collision->second << " map to nearly the same image\n";
    if (report.degenerate_point)
        log << "not an embedding: gradient vanishes at grid point "
            << *report.degenerate_point << '\n';
    return 1;
}

int run_constants(const RunConfig& cfg, std::ostream& log) {
    const auto basis = cfg.basis();
    const auto cert = separation_check(basis, auto_separation_candidates(basis));
    write_json(cfg, "certificate.json", certificate_json(cert));
    if (!cert.pass) {
        log << "separation failed: " << cert.failure << '\n';
        return 1;
    }
    const auto pc = proof_constants(cert, basis, cfg.mode.mode, cfg.drift);
    json j;
    j["c1_norm_max"] = pc.c1_norm_max;
    j["C"] = pc.C;
    j["alpha"] = pc.alpha;
    j["n_prime"] = pc.n_prime;
    j["n_big"] = pc.n_big;
    write_json(cfg, "constants.json", j);
    log << "C=" << shortest(pc.C) << " alpha=" << shortest(pc.alpha)
        << " n_prime=" << pc.n_prime << " n_big=" << pc.n_big << '\n';
    return 0;
}

int run_oracle(const RunConfig& cfg, int max_m, int max_steps, int n_seeds,
               std::ostream& log) {
    if (max_m < 8) throw ConfigError("--max-m must be at least 8");
    if (max_steps < 1) throw ConfigError("--max-steps must be positive");
    if (n_seeds < 1) throw ConfigError("--seeds must be positive");

    int checked = 0;
    for (int m = 8; m <= max_m; m += 4) {
        for (int steps = 1; steps <= max_steps; ++steps) {
            double paths = 1.0;
            for (int k = 0; k <= steps; ++k) paths *= m;
            if (paths > 2e7)
                throw ConfigError("oracle instance too large to enumerate");
            for (int s = 0; s < n_seeds; ++s) {
                const auto key = rng::derive_key(
                    rng::derive_key(cfg.master_seed,
                                    static_cast<std::uint64_t>(m) * 1000 + steps),
                    s);
                std::vector<std::vector<double>> rows(
                    steps, std::vector<double>(m, 0.0));
                for (int n = 0; n < steps; ++n) {
                    const auto row_key = rng::derive_key(key, n);
                    for (int i = 0; i < m; ++i)
                        rows[n][i] = rng::stream_uniform_box(row_key, i, 1.0);
                }
                std::vector<double> psi(m, 0.0);
                const auto psi_key = rng::derive_key(key, steps);
                for (int i = 0; i < m; ++i)
                    psi[i] = rng::stream_uniform_box(psi_key, i, 1.0);

                const TableForcing forcing{0, rows};
                const SolverOptions opt{cfg.drift, 1.0, cfg.winding_bound};
                const auto ev = evolve(forcing, 0, steps, opt, psi);
                const auto ref = oracle::enumerate_paths(forcing, 0, steps, opt, psi);
                for (int x = 0; x < m; ++x) {
                    const double got = ev.value(steps, x);
                    const double want = ref.values[x];
                    if (std::fabs(got - want) >
                        1e-12 * std::max(1.0, std::fabs(want))) {
                        log << "value mismatch: M=" << m << " steps=" << steps
                            << " seed=" << s << " terminal=" << x << " dp=" << got
                            << " oracle=" << want << '\n';
                        return 4;
                    }
                    const auto path = backtrack(ev, x);
                    if (path.positions != ref.positions[x] ||
                        path.windings != ref.windings[x]) {
                        log << "path mismatch: M=" << m << " steps=" << steps
                            << " seed=" << s << " terminal=" << x << '\n';
                        return 4;
                    }
                }
                ++checked;
            }
        }
    }
    log << "oracle: " << checked << " instances matched\n";
    return 0;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace minlab
