#include "gqdisc/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gqdisc/error.hpp"

namespace gqd {

namespace {

void require_finite(std::span<const double> data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw Error(ErrorCode::Input, "non-finite value at position " + std::to_string(i));
        }
    }
}

void require_order(int max_order) {
    if (max_order < 0) throw Error(ErrorCode::Input, "moment order must be non-negative");
}

}  // namespace

MomentSequence::MomentSequence(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorCode::Input, "moment sequence needs at least m_0");
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::Input, "non-finite moment");
    }
    if (!(values_.front() > 0.0)) throw Error(ErrorCode::Input, "m_0 must be positive");
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw Error(ErrorCode::Input, "mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!std::isfinite(c.proportion) || !std::isfinite(c.mean) || !std::isfinite(c.stddev)) {
            throw Error(ErrorCode::Input, "non-finite mixture parameter");
        }
        if (c.proportion < 0.0 || c.proportion > 1.0) {
            throw Error(ErrorCode::Input, "mixture proportion outside [0, 1]");
        }
        if (c.stddev < 0.0) throw Error(ErrorCode::Input, "negative component standard deviation");
        total += c.proportion;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::Input, "mixture proportions must sum to 1");
}

double GaussianMixture::mean() const noexcept {
    double m = 0.0;
    for (const auto& c : components_) m += c.proportion * c.mean;
    return m;
}

double GaussianMixture::stddev() const noexcept {
    const double mu = mean();
    double var = 0.0;
    for (const auto& c : components_) {
        const double d = c.mean - mu;
        var += c.proportion * (c.stddev * c.stddev + d * d);
    }
    return std::sqrt(var);
}

GaussianMixture GaussianMixture::transformed(const AffineTransform& t) const {
    if (!(t.scale > 0.0)) throw Error(ErrorCode::Input, "transform scale must be positive");
    std::vector<GaussianComponent> out;
    out.reserve(components_.size());
    for (const auto& c : components_) {
        out.push_back({c.proportion, t.invert(c.mean), c.stddev / t.scale});
    }
    return GaussianMixture(std::move(out));
}

GaussianMixture reference_mixture() {
    return GaussianMixture({{0.1392, -0.2242, 0.2164}, {0.8608, 0.1064, 0.1453}});
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        correction_ += (sum_ - t) + x;
    } else {
        correction_ += (x - t) + sum_;
    }
    sum_ = t;
}

SampleStats sample_stats(std::span<const double> data) {
    if (data.empty()) throw Error(ErrorCode::Input, "empty data");
    require_finite(data);
    const double n = static_cast<double>(data.size());
    CompensatedSum s;
    for (double x : data) s.add(x);
    const double mean = s.value() / n;
    CompensatedSum ss;
    for (double x : data) ss.add((x - mean) * (x - mean));
    return {mean, std::sqrt(ss.value() / n)};
}

MomentSequence sample_moments(std::span<const double> data, int max_order) {
    if (data.empty()) throw Error(ErrorCode::Input, "empty data");
    require_order(max_order);
    require_finite(data);
    const auto order = static_cast<std::size_t>(max_order);
    std::vector<CompensatedSum> sums(order + 1);
    for (double x : data) {
        double p = x;
        for (std::size_t k = 1; k <= order; ++k) {
            sums[k].add(p);
            p *= x;
        }
    }
    const double n = static_cast<double>(data.size());
    std::vector<double> m(order + 1);
    m[0] = 1.0;
    for (std::size_t k = 1; k <= order; ++k) m[k] = sums[k].value() / n;
    return MomentSequence(std::move(m));
}

Standardized standardize(std::span<const double> data) {
    const SampleStats st = sample_stats(data);
    double biggest = 0.0;
    for (double x : data) biggest = std::max(biggest, std::abs(x));
    if (!(st.stddev > 8.0 * std::numeric_limits<double>::epsilon() * biggest)) {
        throw Error(ErrorCode::Degenerate, "data has zero standard deviation");
    }
    Standardized out{{st.mean, st.stddev}, {}};
    out.data.reserve(data.size());
    for (double x : data) out.data.push_back(out.transform.invert(x));
    return out;
}

MomentSequence gaussian_moments(double mean, double stddev, int max_order) {
    require_order(max_order);
    if (!std::isfinite(mean) || !std::isfinite(stddev)) throw Error(ErrorCode::Input, "non-finite Gaussian parameter");
    if (stddev < 0.0) throw Error(ErrorCode::Input, "negative standard deviation");
    const double var = stddev * stddev;
    std::vector<double> m(static_cast<std::size_t>(max_order) + 1);
    m[0] = 1.0;
    if (max_order >= 1) m[1] = mean;
    for (std::size_t k = 2; k < m.size(); ++k) {
        m[k] = mean * m[k - 1] + static_cast<double>(k - 1) * var * m[k - 2];
    }
    return MomentSequence(std::move(m));
}

MomentSequence mixture_moments(const GaussianMixture& mix, int max_order) {
    require_order(max_order);
    std::vector<double> m(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (const auto& c : mix.components()) {
        if (c.proportion == 0.0) continue;
        const MomentSequence g = gaussian_moments(c.mean, c.stddev, max_order);
        for (std::size_t k = 0; k < m.size(); ++k) m[k] += c.proportion * g[static_cast<int>(k)];
    }
    m[0] = 1.0;
    return MomentSequence(std::move(m));
}

}  // namespace gqd
