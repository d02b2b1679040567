#ifndef SQUATS_BASELINES_HPP
#define SQUATS_BASELINES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "squats/errors.hpp"
#include "squats/quantizer.hpp"
#include "squats/rng.hpp"
#include "squats/signal.hpp"

namespace squats {

// Plain uniform quantizer without a reserved zero level: `levels` uniform
// cells on [lo, hi], saturating outside. Reproduction values are either cell
// midpoints or standard-Gaussian conditional centroids of the decision
// regions (outer regions unbounded in centroid mode).
class PlainQuantizer {
public:
    PlainQuantizer(int levels, double lo = -2.0, double hi = 2.0, bool centroid = false)
        : levels_(levels), lo_(lo), hi_(hi) {
        if (levels < 1) throw std::invalid_argument("PlainQuantizer: levels must be >= 1");
        if (!(lo < hi)) throw std::invalid_argument("PlainQuantizer: need lo < hi");
        values_.resize(levels);
        const double width = (hi - lo) / levels;
        for (int c = 0; c < levels; ++c) {
            if (!centroid) {
                values_[c] = lo + (c + 0.5) * width;
            } else {
                const double a = (c == 0) ? -INFINITY : lo + c * width;
                const double b = (c == levels - 1) ? INFINITY : lo + (c + 1) * width;
                const double pa = std::isinf(a) ? 0.0 : gaussian_pdf(a);
                const double pb = std::isinf(b) ? 0.0 : gaussian_pdf(b);
                const double ca = std::isinf(a) ? 0.0 : gaussian_cdf(a);
                const double cb = std::isinf(b) ? 1.0 : gaussian_cdf(b);
                values_[c] = (pa - pb) / (cb - ca);
            }
        }
    }

    int levels() const { return levels_; }

    int cell(double x) const {
        const double width = (hi_ - lo_) / levels_;
        int c = static_cast<int>(std::floor((x - lo_) / width));
        return std::clamp(c, 0, levels_ - 1);
    }

    double cell_value(int c) const { return values_[c]; }
    double quantize_value(double x) const { return values_[cell(x)]; }

private:
    int levels_;
    double lo_, hi_;
    std::vector<double> values_;
};

// Direct serial scalar quantization at rate R: 2^floor(R) levels applied to
// every sample independently. Feasible only for R >= 1.
inline std::vector<double> direct_quantize(const SparseSignal& s, double rate,
                                           bool centroid = true) {
    if (rate < 1.0)
        throw InfeasibleError("direct_quantize: scalar quantization needs R >= 1");
    const int levels = 1 << static_cast<int>(std::floor(rate));
    PlainQuantizer q(levels, -2.0, 2.0, centroid);
    std::vector<double> out(s.values.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = q.quantize_value(s.values[i]);
    return out;
}

inline Eigen::MatrixXd gaussian_sensing(int m, int T, Rng& rng) {
    Eigen::MatrixXd A(m, T);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < T; ++c) A(r, c) = rng.normal();
    return A;
}

// Largest squared singular value via power iteration on A^T A.
inline double spectral_norm_sq(const Eigen::MatrixXd& A) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd w = A.transpose() * (A * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        lambda = norm;
    }
    return lambda;
}

struct CsEncoded {
    Eigen::VectorXd y;   // dequantized measurement values
    int levels = 0;      // quantizer levels per measurement
    int64_t bits_used = 0;
};

// Compress-and-quantize front end: project with A, then scalar-quantize each
// measurement on [-2, 2] with 2^floor(bit_budget/m) levels so the emitted
// bits never exceed the budget.
inline CsEncoded cs_encode(const Eigen::VectorXd& s, const Eigen::MatrixXd& A,
                           int64_t bit_budget) {
    const int m = static_cast<int>(A.rows());
    const int64_t bits_per = bit_budget / m;
    if (bits_per < 1)
        throw InfeasibleError("cs_encode: budget below one bit per measurement");
    const int shift = static_cast<int>(std::min<int64_t>(bits_per, 16));
    CsEncoded out;
    out.levels = 1 << shift;
    out.bits_used = static_cast<int64_t>(m) * shift;
    PlainQuantizer q(out.levels, -2.0, 2.0, false);
    const Eigen::VectorXd proj = A * s;
    out.y.resize(m);
    for (int i = 0; i < m; ++i) out.y[i] = q.quantize_value(proj[i]);
    return out;
}

namespace detail {

// Hard threshold to the k largest magnitudes (ties to the lower index).
inline void hard_threshold(Eigen::VectorXd& x, int k) {
    const int n = static_cast<int>(x.size());
    if (k >= n) return;
    if (k <= 0) {
        x.setZero();
        return;
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::nth_element(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
        const double da = std::abs(x[a]), db = std::abs(x[b]);
        return da != db ? da > db : a < b;
    });
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) out[idx[i]] = x[idx[i]];
    x = out;
}

inline double soft(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace detail

struct QihtResult {
    Eigen::VectorXd x;
    bool diverged = false;
    int iters = 0;
};

// Iterative hard thresholding adapted to quantized measurements: the residual
// is taken against the re-quantized forward projection, which drives the
// iterate toward quantization consistency. The step is the normalized-IHT
// adaptive one (gradient restricted to the working support), falling back to
// 1/||A||_2^2 when degenerate; a fixed 1/||A||_2^2 step stalls in local
// minima often enough to miss easy supports.
inline QihtResult qiht_recover(const CsEncoded& enc, const Eigen::MatrixXd& A, int k,
                               int iters = 300) {
    QihtResult res;
    const int n = static_cast<int>(A.cols());
    res.x = Eigen::VectorXd::Zero(n);
    if (k <= 0) return res;
    const double nsq = spectral_norm_sq(A);
    if (nsq == 0.0) return res;
    PlainQuantizer q(enc.levels, -2.0, 2.0, false);

    auto consistency_residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd proj = A * x;
        for (int i = 0; i < proj.size(); ++i) proj[i] = q.quantize_value(proj[i]);
        return Eigen::VectorXd(enc.y - proj);
    };

    Eigen::VectorXd best = res.x;
    double best_resid = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd r = consistency_residual(res.x);
        const double resid = r.norm();
        if (resid < best_resid) {
            best_resid = resid;
            best = res.x;
        }
        const Eigen::VectorXd g = A.transpose() * r;
        // working support: current nonzeros plus the k largest gradients
        Eigen::VectorXd gs = Eigen::VectorXd::Zero(n);
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        std::nth_element(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
            const double da = std::abs(g[a]), db = std::abs(g[b]);
            return da != db ? da > db : a < b;
        });
        for (int i = 0; i < k; ++i) gs[idx[i]] = g[idx[i]];
        for (int i = 0; i < n; ++i)
            if (res.x[i] != 0.0) gs[i] = g[i];
        const double denom = (A * gs).squaredNorm();
        const double mu = denom > 0.0 ? gs.squaredNorm() / denom : 1.0 / nsq;
        res.x += mu * g;
        detail::hard_threshold(res.x, k);
        res.iters = it + 1;
        if (!res.x.allFinite() || res.x.norm() > 1e9) {
            res.diverged = true;
            res.x = best;
            return res;
        }
    }
    if (consistency_residual(res.x).norm() > best_resid) res.x = best;
    return res;
}

// Objective ||A x - y||^2 + lambda ||x||_1 used by the FISTA solver.
inline double fista_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                              double lambda, const Eigen::VectorXd& x) {
    return (A * x - y).squaredNorm() + lambda * x.lpNorm<1>();
}

// Accelerated proximal gradient on ||A x - y||^2 + lambda ||x||_1 with a
// monotone restart: if a momentum step raises the objective, momentum resets
// and the step is retaken from the previous iterate, so the objective trace
// never increases.
inline Eigen::VectorXd fista_recover(const Eigen::VectorXd& y, const Eigen::MatrixXd& A,
                                     double lambda, int iters = 500,
                                     std::vector<double>* objective_trace = nullptr) {
    const int n = static_cast<int>(A.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd z = x;
    double t = 1.0;
    const double nsq = spectral_norm_sq(A);
    if (nsq == 0.0) return x;
    const double L = 2.0 * nsq;  // Lipschitz constant of the squared-error gradient
    double fx = fista_objective(A, y, lambda, x);
    if (objective_trace) objective_trace->push_back(fx);

    auto prox_step = [&](const Eigen::VectorXd& point) {
        Eigen::VectorXd g = point - (2.0 / L) * (A.transpose() * (A * point - y));
        for (int i = 0; i < n; ++i) g[i] = detail::soft(g[i], lambda / L);
        return g;
    };

    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd x_next = prox_step(z);
        double f_next = fista_objective(A, y, lambda, x_next);
        if (f_next > fx) {
            // restart momentum; a plain proximal step from x cannot ascend
            t = 1.0;
            z = x;
            x_next = prox_step(z);
            f_next = fista_objective(A, y, lambda, x_next);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = x_next + ((t - 1.0) / t_next) * (x_next - x);
        x = x_next;
        fx = f_next;
        t = t_next;
        if (objective_trace) objective_trace->push_back(fx);
    }
    return x;
}

// Block-diagonal sensing for the distributed baseline: one matrix per signal,
// measurements stacked, recovery joint over the concatenated vector.
struct BlockSensing {
    std::vector<Eigen::MatrixXd> blocks;

    int rows() const {
        int r = 0;
        for (const auto& b : blocks) r += static_cast<int>(b.rows());
        return r;
    }
    int cols() const {
        int c = 0;
        for (const auto& b : blocks) c += static_cast<int>(b.cols());
        return c;
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows(), cols());
        int r = 0, c = 0;
        for (const auto& b : blocks) {
            A.block(r, c, b.rows(), b.cols()) = b;
            r += static_cast<int>(b.rows());
            c += static_cast<int>(b.cols());
        }
        return A;
    }
};

}  // namespace squats

#endif
