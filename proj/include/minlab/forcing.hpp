#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "minlab/errors.hpp"

namespace minlab {

/// One Fourier basis row, value(x) = cos(2*pi*frequency*x - phase).
/// phase 0 gives a cosine, phase pi/2 gives a sine.
struct FourierMode {
    int frequency = 1;
    double phase = 0.0;
};

/// K smooth 1-periodic potentials sampled on the uniform grid x_i = i/M,
/// together with their analytic first and second derivatives.
class PotentialBasis {
public:
    PotentialBasis(int count, int grid_size);

    int count() const { return count_; }
    int grid_size() const { return grid_size_; }

    double value(int k, int i) const { return values_[index(k, i)]; }
    double gradient(int k, int i) const { return gradients_[index(k, i)]; }
    double curvature(int k, int i) const { return curvatures_[index(k, i)]; }

    std::span<const double> value_row(int k) const {
        return {values_.data() + static_cast<std::size_t>(k) * grid_size_,
                static_cast<std::size_t>(grid_size_)};
    }

    void set_point(int k, int i, double value, double gradient, double curvature);

    const std::vector<FourierMode>& modes() const { return modes_; }
    void set_modes(std::vector<FourierMode> modes) { modes_ = std::move(modes); }

private:
    std::size_t index(int k, int i) const {
        return static_cast<std::size_t>(k) * grid_size_ + i;
    }

    int count_;
    int grid_size_;
    std::vector<double> values_;
    std::vector<double> gradients_;
    std::vector<double> curvatures_;
    std::vector<FourierMode> modes_;
};

/// Samples cos(2*pi*f*x - phase) rows on an M-point grid.
/// Requires M >= 8 and at least one mode.
PotentialBasis make_fourier_basis(std::span<const FourierMode> modes, int grid_size);
PotentialBasis make_fourier_basis(std::initializer_list<FourierMode> modes, int grid_size);

/// Parses tokens like "fourier:1c,1s,2c,2s" (frequency + cos/sin suffix).
std::vector<FourierMode> parse_basis_spec(const std::string& spec);
std::string format_basis_spec(std::span<const FourierMode> modes);

/// Result of the injectivity / immersion check of x -> (F^1(x),...,F^K(x)).
struct EmbeddingReport {
    bool pass = false;
    /// First grid pair whose images nearly coincide relative to their
    /// circle distance.
    std::optional<std::pair<int, int>> collision;
    /// First grid point where the joint gradient vector degenerates.
    std::optional<int> degenerate_point;
};

/// Separation threshold: image points must differ by more than
/// kEmbeddingTolerance times their circle distance.
inline constexpr double kEmbeddingTolerance = 1e-6;

EmbeddingReport check_embedding(const PotentialBasis& basis,
                                double tolerance = kEmbeddingTolerance);

enum class DistKind { UniformBox, Gaussian };

/// Coefficient distribution; sigma is the box half-width (uniform) or the
/// standard deviation (gaussian).
struct Distribution {
    DistKind kind = DistKind::UniformBox;
    double sigma = 1.0;

    bool operator==(const Distribution&) const = default;
};

enum class ForcingMode { Kicked, White };

/// Kicked mode acts at integer times; white mode is discretized into
/// `substeps` Gaussian sub-kicks per unit time.
struct ModeSpec {
    ForcingMode mode = ForcingMode::Kicked;
    int substeps = 1;

    double dt() const { return 1.0 / substeps; }

    bool operator==(const ModeSpec&) const = default;
};

Distribution parse_dist_spec(const std::string& spec);
std::string format_dist_spec(const Distribution& dist);
ModeSpec parse_mode_spec(const std::string& spec);
std::string format_mode_spec(const ModeSpec& mode);

/// One realized kick: the coefficient vector applied at a given time index.
struct KickPotential {
    std::vector<double> coefficients;
    std::int64_t time_index = 0;
};

/// Deterministic, seed-keyed stream of i.i.d. coefficient vectors c(j).
/// coefficients(j) is a pure function of (master_seed, j): queries are
/// repeatable, order-independent, and safe from concurrent workers.
class KickSequence {
public:
    KickSequence(std::uint64_t master_seed, Distribution dist, ModeSpec mode, int count);

    std::uint64_t master_seed() const { return master_seed_; }
    const Distribution& distribution() const { return dist_; }
    const ModeSpec& mode() const { return mode_; }
    int coefficient_count() const { return count_; }
    double dt() const { return mode_.dt(); }

    std::vector<double> coefficients(std::int64_t time_index) const;

private:
    std::uint64_t master_seed_;
    Distribution dist_;
    ModeSpec mode_;
    int count_;
};

KickPotential kick_at(const KickSequence& seq, const PotentialBasis& basis,
                      std::int64_t time_index);

/// Exact dot product of kick coefficients with the basis column at grid
/// point i.
double eval_potential(const KickPotential& kick, const PotentialBasis& basis, int i);
double eval_gradient(const KickPotential& kick, const PotentialBasis& basis, int i);
double eval_curvature(const KickPotential& kick, const PotentialBasis& basis, int i);

/// Supplies the solver with the kick energy table F(j)(x_i) per step.
class ForcingField {
public:
    virtual ~ForcingField() = default;
    virtual int grid_size() const = 0;
    /// Fills out[i] = F(time_index)(x_i); out must have grid_size entries.
    virtual void kick_values(std::int64_t time_index, std::span<double> out) const = 0;
};

/// Kick stream expanded through a potential basis.
class BasisForcing : public ForcingField {
public:
    BasisForcing(KickSequence seq, const PotentialBasis& basis)
        : seq_(std::move(seq)), basis_(&basis) {
        if (seq_.coefficient_count() != basis.count())
            throw ConfigError("kick sequence and basis disagree on K");
    }

    int grid_size() const override { return basis_->grid_size(); }
    void kick_values(std::int64_t time_index, std::span<double> out) const override;

    const KickSequence& sequence() const { return seq_; }
    const PotentialBasis& basis() const { return *basis_; }

private:
    KickSequence seq_;
    const PotentialBasis* basis_;
};

/// Uses `past` for times below the switch time and `future` from it on;
/// lets experiments resample futures against a frozen past.
class SplicedForcing : public ForcingField {
public:
    SplicedForcing(const ForcingField& past, const ForcingField& future,
                   std::int64_t switch_time)
        : past_(&past), future_(&future), switch_time_(switch_time) {
        if (past.grid_size() != future.grid_size())
            throw ConfigError("spliced forcings disagree on grid size");
    }

    int grid_size() const override { return past_->grid_size(); }
    void kick_values(std::int64_t time_index, std::span<double> out) const override {
        (time_index < switch_time_ ? past_ : future_)->kick_values(time_index, out);
    }

private:
    const ForcingField* past_;
    const ForcingField* future_;
    std::int64_t switch_time_;
};

/// Forcing backed by explicit per-time rows; row j serves time base + j.
/// Queries outside the stored span throw.
class TableForcing : public ForcingField {
public:
    TableForcing(std::int64_t base_time, std::vector<std::vector<double>> rows);

    int grid_size() const override { return static_cast<int>(rows_.front().size()); }
    void kick_values(std::int64_t time_index, std::span<double> out) const override;

private:
    std::int64_t base_time_;
    std::vector<std::vector<double>> rows_;
};

/// Wraps a forcing with every kick rotated by `shift` grid cells:
/// F'(j)(i) = F(j)((i - shift) mod M). The rotation is an exact index
/// permutation, no arithmetic on the values.
class RotatedForcing : public ForcingField {
public:
    RotatedForcing(const ForcingField& inner, int shift)
        : inner_(&inner), shift_(shift) {}

    int grid_size() const override { return inner_->grid_size(); }
    void kick_values(std::int64_t time_index, std::span<double> out) const override;

private:
    const ForcingField* inner_;
    int shift_;
};

/// F identically zero; the unforced system.
class ZeroForcing : public ForcingField {
public:
    explicit ZeroForcing(int grid_size) : grid_size_(grid_size) {}
    int grid_size() const override { return grid_size_; }
    void kick_values(std::int64_t, std::span<double> out) const override {
        for (auto& v : out) v = 0.0;
    }

private:
    int grid_size_;
};

}  // namespace minlab
