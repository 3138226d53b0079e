#include "minlab/forcing.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "minlab/rng.hpp"

namespace minlab {

PotentialBasis::PotentialBasis(int count, int grid_size)
    : count_(count), grid_size_(grid_size) {
    if (count < 1) throw ConfigError("potential basis needs at least one row");
    if (grid_size < 8) throw ConfigError("grid size below 8 cannot resolve a kick");
    const auto n = static_cast<std::size_t>(count) * grid_size;
    values_.assign(n, 0.0);
    gradients_.assign(n, 0.0);
    curvatures_.assign(n, 0.0);
}

void PotentialBasis::set_point(int k, int i, double value, double gradient,
                               double curvature) {
    const auto at = index(k, i);
    values_[at] = value;
    gradients_[at] = gradient;
    curvatures_[at] = curvature;
}

PotentialBasis make_fourier_basis(std::span<const FourierMode> modes, int grid_size) {
    if (modes.empty()) throw ConfigError("fourier basis needs at least one mode");
    PotentialBasis basis(static_cast<int>(modes.size()), grid_size);
    for (int k = 0; k < basis.count(); ++k) {
        const auto& mode = modes[k];
        if (mode.frequency < 1)
            throw ConfigError("fourier mode frequency must be positive");
        const double omega = 2.0 * M_PI * mode.frequency;
        for (int i = 0; i < grid_size; ++i) {
            const double arg = omega * i / grid_size - mode.phase;
            basis.set_point(k, i, std::cos(arg), -omega * std::sin(arg),
                            -omega * omega * std::cos(arg));
        }
    }
    basis.set_modes(std::vector<FourierMode>(modes.begin(), modes.end()));
    return basis;
}

PotentialBasis make_fourier_basis(std::initializer_list<FourierMode> modes,
                                  int grid_size) {
    return make_fourier_basis(std::span<const FourierMode>(modes.begin(), modes.size()),
                              grid_size);
}

std::vector<FourierMode> parse_basis_spec(const std::string& spec) {
    const std::string prefix = "fourier:";
    if (spec.rfind(prefix, 0) != 0)
        throw ConfigError("unknown basis spec '" + spec + "'");
    std::vector<FourierMode> modes;
    std::stringstream body(spec.substr(prefix.size()));
    std::string token;
    while (std::getline(body, token, ',')) {
        if (token.size() < 2) throw ConfigError("bad basis mode token '" + token + "'");
        const char tail = token.back();
        double phase;
        if (tail == 'c')
            phase = 0.0;
        else if (tail == 's')
            phase = M_PI / 2.0;
        else
            throw ConfigError("basis mode token must end in 'c' or 's': '" + token + "'");
        char* end = nullptr;
        const std::string head = token.substr(0, token.size() - 1);
        const long freq = std::strtol(head.c_str(), &end, 10);
        if (end == head.c_str() || *end != '\0' || freq < 1)
            throw ConfigError("bad basis mode frequency '" + token + "'");
        modes.push_back({static_cast<int>(freq), phase});
    }
    if (modes.empty()) throw ConfigError("basis spec lists no modes");
    return modes;
}

std::string format_basis_spec(std::span<const FourierMode> modes) {
    std::string out = "fourier:";
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(modes[k].frequency);
        out += modes[k].phase == 0.0 ? 'c' : 's';
    }
    return out;
}

EmbeddingReport check_embedding(const PotentialBasis& basis, double tolerance) {
    EmbeddingReport report;
    const int m = basis.grid_size();
    const int k = basis.count();

    for (int i = 0; i < m && !report.collision; ++i) {
        for (int j = i + 1; j < m; ++j) {
            double dist2 = 0.0;
            for (int row = 0; row < k; ++row) {
                const double d = basis.value(row, i) - basis.value(row, j);
                dist2 += d * d;
            }
            const int gap = std::min(j - i, m - (j - i));
            const double circle = static_cast<double>(gap) / m;
            if (dist2 <= tolerance * tolerance * circle * circle) {
                report.collision = {i, j};
                break;
            }
        }
    }

    for (int i = 0; i < m && !report.degenerate_point; ++i) {
        double norm2 = 0.0;
        for (int row = 0; row < k; ++row) {
            const double g = basis.gradient(row, i);
            norm2 += g * g;
        }
        if (norm2 <= tolerance * tolerance) report.degenerate_point = i;
    }

    report.pass = !report.collision && !report.degenerate_point;
    return report;
}

Distribution parse_dist_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    Distribution dist;
    if (name == "uniform")
        dist.kind = DistKind::UniformBox;
    else if (name == "gauss")
        dist.kind = DistKind::Gaussian;
    else
        throw ConfigError("unknown distribution '" + spec + "'");
    if (colon != std::string::npos) {
        char* end = nullptr;
        const std::string tail = spec.substr(colon + 1);
        dist.sigma = std::strtod(tail.c_str(), &end);
        if (end == tail.c_str() || *end != '\0')
            throw ConfigError("bad distribution width '" + spec + "'");
    }
    if (!(dist.sigma >= 0.0)) throw ConfigError("distribution width must not be negative");
    return dist;
}

std::string format_dist_spec(const Distribution& dist) {
    // Shortest digits that parse back to the same double, so specs
    // round-trip exactly.
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, dist.sigma);
    return std::string(dist.kind == DistKind::UniformBox ? "uniform" : "gauss") + ':' +
           std::string(buf, r.ptr);
}

ModeSpec parse_mode_spec(const std::string& spec) {
    ModeSpec mode;
    if (spec == "kicked") {
        mode.mode = ForcingMode::Kicked;
        mode.substeps = 1;
        return mode;
    }
    const std::string prefix = "white:";
    if (spec.rfind(prefix, 0) == 0) {
        char* end = nullptr;
        const std::string tail = spec.substr(prefix.size());
        const long p = std::strtol(tail.c_str(), &end, 10);
        if (end == tail.c_str() || *end != '\0' || p < 1)
            throw ConfigError("bad substep count '" + spec + "'");
        mode.mode = ForcingMode::White;
        mode.substeps = static_cast<int>(p);
        return mode;
    }
    throw ConfigError("unknown forcing mode '" + spec + "'");
}

std::string format_mode_spec(const ModeSpec& mode) {
    if (mode.mode == ForcingMode::Kicked) return "kicked";
    return "white:" + std::to_string(mode.substeps);
}

KickSequence::KickSequence(std::uint64_t master_seed, Distribution dist, ModeSpec mode,
                           int count)
    : master_seed_(master_seed), dist_(dist), mode_(mode), count_(count) {
    if (count < 1) throw ConfigError("kick sequence needs at least one coefficient");
    if (mode.substeps < 1) throw ConfigError("substep count must be positive");
    if (mode.mode == ForcingMode::Kicked && mode.substeps != 1)
        throw ConfigError("kicked mode has exactly one step per unit time");
}

std::vector<double> KickSequence::coefficients(std::int64_t time_index) const {
    const std::uint64_t key =
        rng::derive_key(master_seed_, static_cast<std::uint64_t>(time_index));
    std::vector<double> c(count_);
    if (mode_.mode == ForcingMode::White) {
        // Increments of a white-in-time signal over a window of length dt
        // scale like sqrt(dt); they are Gaussian regardless of dist_.kind.
        const double sigma = dist_.sigma / std::sqrt(static_cast<double>(mode_.substeps));
        for (int k = 0; k < count_; ++k)
            c[k] = rng::stream_gaussian(key, static_cast<std::uint64_t>(k), sigma);
        return c;
    }
    switch (dist_.kind) {
        case DistKind::UniformBox:
            for (int k = 0; k < count_; ++k)
                c[k] = rng::stream_uniform_box(key, static_cast<std::uint64_t>(k),
                                               dist_.sigma);
            break;
        case DistKind::Gaussian:
            for (int k = 0; k < count_; ++k)
                c[k] = rng::stream_gaussian(key, static_cast<std::uint64_t>(k),
                                            dist_.sigma);
            break;
    }
    return c;
}

KickPotential kick_at(const KickSequence& seq, const PotentialBasis& basis,
                      std::int64_t time_index) {
    if (seq.coefficient_count() != basis.count())
        throw ConfigError("kick sequence and basis disagree on K");
    return {seq.coefficients(time_index), time_index};
}

namespace {

void check_eval(const KickPotential& kick, const PotentialBasis& basis, int i) {
    if (i < 0 || i >= basis.grid_size())
        throw std::out_of_range("grid index outside the basis");
    if (static_cast<int>(kick.coefficients.size()) != basis.count())
        throw std::invalid_argument("kick and basis disagree on K");
}

}  // namespace

double eval_potential(const KickPotential& kick, const PotentialBasis& basis, int i) {
    check_eval(kick, basis, i);
    double sum = 0.0;
    for (int k = 0; k < basis.count(); ++k) sum += kick.coefficients[k] * basis.value(k, i);
    return sum;
}

double eval_gradient(const KickPotential& kick, const PotentialBasis& basis, int i) {
    check_eval(kick, basis, i);
    double sum = 0.0;
    for (int k = 0; k < basis.count(); ++k)
        sum += kick.coefficients[k] * basis.gradient(k, i);
    return sum;
}

double eval_curvature(const KickPotential& kick, const PotentialBasis& basis, int i) {
    check_eval(kick, basis, i);
    double sum = 0.0;
    for (int k = 0; k < basis.count(); ++k)
        sum += kick.coefficients[k] * basis.curvature(k, i);
    return sum;
}

TableForcing::TableForcing(std::int64_t base_time, std::vector<std::vector<double>> rows)
    : base_time_(base_time), rows_(std::move(rows)) {
    if (rows_.empty()) throw ConfigError("table forcing needs at least one row");
    for (const auto& row : rows_)
        if (row.size() != rows_.front().size())
            throw ConfigError("table forcing rows must share one grid size");
}

void TableForcing::kick_values(std::int64_t time_index, std::span<double> out) const {
    const std::int64_t j = time_index - base_time_;
    if (j < 0 || j >= static_cast<std::int64_t>(rows_.size()))
        throw std::out_of_range("table forcing queried outside its span");
    const auto& row = rows_[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = row[i];
}

void RotatedForcing::kick_values(std::int64_t time_index, std::span<double> out) const {
    const int m = inner_->grid_size();
    std::vector<double> tmp(m);
    inner_->kick_values(time_index, tmp);
    const int shift = (shift_ % m + m) % m;
    for (int i = 0; i < m; ++i) out[i] = tmp[(i - shift + m) % m];
}

void BasisForcing::kick_values(std::int64_t time_index, std::span<double> out) const {
    const auto c = seq_.coefficients(time_index);
    const int m = basis_->grid_size();
    for (int i = 0; i < m; ++i) out[i] = 0.0;
    for (int k = 0; k < basis_->count(); ++k) {
        const auto row = basis_->value_row(k);
        const double ck = c[k];
        for (int i = 0; i < m; ++i) out[i] += ck * row[i];
    }
}

}  // namespace minlab
