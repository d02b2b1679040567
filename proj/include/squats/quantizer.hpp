#ifndef SQUATS_QUANTIZER_HPP
#define SQUATS_QUANTIZER_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "squats/parallel.hpp"
#include "squats/rng.hpp"
#include "squats/signal.hpp"

namespace squats {

inline double gaussian_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

enum class Reproduction { Midpoint, GaussianCentroid };

// Scalar map with l+1 outputs: a dedicated exact-zero level q_0 = 0 plus one
// reproduction value per uniform cell of [lo, hi]. Inputs outside the support
// saturate to the nearest boundary cell. Reproduction values are cell
// midpoints by default; the centroid mode uses the standard-Gaussian
// conditional mean of each decision region (outer regions unbounded).
class ScalarQuantizer {
public:
    struct Out {
        int index;     // 0..l, 0 means the zero level
        double value;  // q_index
    };

    explicit ScalarQuantizer(int levels, double lo = -2.0, double hi = 2.0,
                             Reproduction repro = Reproduction::Midpoint)
        : levels_(levels), lo_(lo), hi_(hi) {
        if (levels < 1) throw std::invalid_argument("ScalarQuantizer: levels must be >= 1");
        if (!(lo < hi)) throw std::invalid_argument("ScalarQuantizer: need lo < hi");
        values_.resize(levels + 1);
        values_[0] = 0.0;
        const double width = (hi - lo) / levels;
        for (int j = 1; j <= levels; ++j) {
            if (repro == Reproduction::Midpoint) {
                values_[j] = lo + (j - 0.5) * width;
            } else {
                const double a = (j == 1) ? -INFINITY : lo + (j - 1) * width;
                const double b = (j == levels) ? INFINITY : lo + j * width;
                const double pa = std::isinf(a) ? 0.0 : gaussian_pdf(a);
                const double pb = std::isinf(b) ? 0.0 : gaussian_pdf(b);
                const double ca = std::isinf(a) ? 0.0 : gaussian_cdf(a);
                const double cb = std::isinf(b) ? 1.0 : gaussian_cdf(b);
                values_[j] = (pa - pb) / (cb - ca);
            }
        }
    }

    int levels() const { return levels_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double level_value(int j) const { return values_[j]; }

    Out quantize(double x) const {
        if (x == 0.0) return {0, 0.0};
        const double width = (hi_ - lo_) / levels_;
        int cell = static_cast<int>(std::floor((x - lo_) / width));
        if (cell < 0) cell = 0;
        if (cell >= levels_) cell = levels_ - 1;
        return {cell + 1, values_[cell + 1]};
    }

private:
    int levels_;
    double lo_, hi_;
    std::vector<double> values_;
};

// Monte Carlo estimate of the per-sample average squared quantization error
// (1/T) sum_i E|s[i] - Q(s[i])|^2. Trials use independent seed-derived
// streams, so the estimate does not depend on the thread count.
inline double empirical_avg_mse(const std::function<SparseSignal(Rng&)>& sampler,
                                const ScalarQuantizer& q, int trials, uint64_t seed,
                                int threads = 1) {
    if (trials < 1) throw std::invalid_argument("empirical_avg_mse: trials must be >= 1");
    std::vector<double> per_trial(trials, 0.0);
    parallel_for(trials, threads, [&](int64_t t) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
        const SparseSignal s = sampler(rng);
        double sum = 0.0;
        for (double x : s.values) {
            const double d = x - q.quantize(x).value;
            sum += d * d;
        }
        per_trial[t] = s.values.empty() ? 0.0 : sum / static_cast<double>(s.values.size());
    });
    double acc = 0.0;
    for (double v : per_trial) acc += v;
    return acc / trials;
}

// Panter-Dite high resolution approximation of the distortion of an optimal
// scalar quantizer with l+1 output levels:
//   (1/12) * 2^(-2 log2(l+1)) * (integral of pdf^(1/3))^3.
// The integral is evaluated with a composite trapezoid rule.
inline double panter_dite_mse(const std::function<double(double)>& pdf, int levels,
                              double lo = -10.0, double hi = 10.0,
                              int points = (1 << 16)) {
    if (levels < 0) throw std::invalid_argument("panter_dite_mse: levels must be >= 0");
    if (points < 2 || !(lo < hi)) throw std::invalid_argument("panter_dite_mse: bad grid");
    const double h = (hi - lo) / (points - 1);
    double integral = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = lo + i * h;
        const double f = pdf(x);
        if (!(f >= 0.0) || !std::isfinite(f))
            throw std::invalid_argument("panter_dite_mse: pdf not finite/nonnegative on grid");
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        integral += w * std::cbrt(f);
    }
    integral *= h;
    if (!std::isfinite(integral))
        throw std::invalid_argument("panter_dite_mse: integral diverged");
    const double cubed = integral * integral * integral;
    return cubed / 12.0 * std::exp2(-2.0 * std::log2(static_cast<double>(levels + 1)));
}

}  // namespace squats

#endif
