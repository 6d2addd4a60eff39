#pragma once

#include <span>
#include <utility>
#include <vector>

namespace gqd {

/// Raw moments m_0..m_K of a measure. m_0 is the total mass.
class MomentSequence {
public:
    MomentSequence() = default;
    explicit MomentSequence(std::vector<double> values);

    [[nodiscard]] int max_order() const noexcept { return static_cast<int>(values_.size()) - 1; }
    [[nodiscard]] double mass() const noexcept { return values_.front(); }
    [[nodiscard]] double operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// Location/scale map between data units and standardized units:
/// x = shift + scale * z.
struct AffineTransform {
    double shift = 0.0;
    double scale = 1.0;

    [[nodiscard]] double apply(double z) const noexcept { return shift + scale * z; }
    [[nodiscard]] double invert(double x) const noexcept { return (x - shift) / scale; }
};

struct GaussianComponent {
    double proportion;
    double mean;
    double stddev;
};

/// Finite mixture of normal laws. Proportions must sum to one.
class GaussianMixture {
public:
    explicit GaussianMixture(std::vector<GaussianComponent> components);

    [[nodiscard]] std::span<const GaussianComponent> components() const noexcept { return components_; }
    [[nodiscard]] double mean() const noexcept;
    [[nodiscard]] double stddev() const noexcept;

    /// Law of (X - shift) / scale.
    [[nodiscard]] GaussianMixture transformed(const AffineTransform& t) const;

private:
    std::vector<GaussianComponent> components_;
};

/// Mixture fitted to annual log excess returns, used as ground truth in the
/// Monte Carlo study.
GaussianMixture reference_mixture();

/// Compensated (Neumaier) accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

struct SampleStats {
    double mean;
    double stddev;  // divisor I
};

SampleStats sample_stats(std::span<const double> data);

MomentSequence sample_moments(std::span<const double> data, int max_order);

struct Standardized {
    AffineTransform transform;
    std::vector<double> data;
};

/// Throws Degenerate if the data has no spread.
Standardized standardize(std::span<const double> data);

MomentSequence gaussian_moments(double mean, double stddev, int max_order);

MomentSequence mixture_moments(const GaussianMixture& mix, int max_order);

}  // namespace gqd
