#ifndef SQUATS_RATES_HPP
#define SQUATS_RATES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "squats/signal.hpp"

namespace squats {

// log2 of C(n, k) via lgamma; -inf when the coefficient is zero.
inline double log2_binomial(int64_t n, int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    const double ln = std::lgamma(static_cast<double>(n + 1)) -
                      std::lgamma(static_cast<double>(k + 1)) -
                      std::lgamma(static_cast<double>(n - k + 1));
    return ln / M_LN2;
}

inline int64_t bits_for_rate(double rate, int64_t samples) {
    return static_cast<int64_t>(std::ceil(rate * static_cast<double>(samples) - 1e-9));
}

// Sufficient rate for the exhaustive-search decoder:
//   max over 1 <= i <= k of ((1+eps) k / (i T)) log2( C(T-k, i) l^i ).
// Terms with a zero binomial coefficient are skipped; an empty max is 0.
inline double sufficient_rate_ml(int T, int k, int l, double eps) {
    if (T < 1 || k < 1 || k > T || l < 1 || eps <= 0.0)
        throw std::invalid_argument("sufficient_rate_ml: bad parameters");
    double best = 0.0;
    for (int i = 1; i <= k; ++i) {
        const double lb = log2_binomial(T - k, i);
        if (std::isinf(lb)) continue;
        const double term =
            (1.0 + eps) * k / (static_cast<double>(i) * T) * (lb + i * std::log2(double(l)));
        best = std::max(best, term);
    }
    return best;
}

// Closed-form upper bound (1+eps) (k/T) log2(T l) on the rate above.
inline double rate_upper_bound(int T, int k, int l, double eps) {
    if (T < 1 || k < 1 || k > T || l < 1 || eps <= 0.0)
        throw std::invalid_argument("rate_upper_bound: bad parameters");
    return (1.0 + eps) * k / static_cast<double>(T) *
           std::log2(static_cast<double>(T) * l);
}

// Asymptotic witness for the bit count: k log2 T + k log2 l.
inline double bits_growth(int T, int k, int l) {
    if (T < 1 || k < 1 || l < 1) throw std::invalid_argument("bits_growth: bad parameters");
    return k * std::log2(double(T)) + k * std::log2(double(l));
}

struct ComaRate {
    double rate;            // (1+eps) e / T * k log2(T l)
    double failure_bound;   // T^(-eps)
};

// Sufficient rate for the column-matching decoder, plus the bound on the
// probability that the decoded sequence misses the scalar-quantizer MSE.
inline ComaRate sufficient_rate_coma(int T, int k, int l, double eps) {
    if (T < 1 || k < 1 || l < 1 || eps <= 0.0)
        throw std::invalid_argument("sufficient_rate_coma: bad parameters");
    ComaRate out;
    out.rate = (1.0 + eps) * M_E / static_cast<double>(T) * k *
               std::log2(static_cast<double>(T) * l);
    out.failure_bound = std::pow(static_cast<double>(T), -eps);
    return out;
}

// Sufficient rate for n jointly sparse length-T sequences:
//   max over u in I(k) of ((1+eps) k / (u n T)) log2( theta l^u ),
// where theta counts the candidate supports. Overall sparsity uses
// theta = C(nT, k), I = {1..k}; structured uses theta = C(n, k_t) C(T, k_s),
// I = {u_t u_s}. swap_structured_indices pairs n with k_s and T with k_t
// instead, in case the printed pairing is transposed.
inline double sufficient_rate_distributed(int n, int T, const JointSparsityModel& model,
                                          int l, double eps,
                                          bool swap_structured_indices = false) {
    if (n < 1 || T < 1 || l < 1 || eps <= 0.0)
        throw std::invalid_argument("sufficient_rate_distributed: bad parameters");
    const int64_t nT = static_cast<int64_t>(n) * T;
    double log2_theta;
    std::vector<int> support_sizes;
    int k;
    if (model.kind == JointSparsityModel::Kind::Overall) {
        k = model.k;
        if (k < 1 || k > nT)
            throw InfeasibleError("sufficient_rate_distributed: overall k out of range");
        log2_theta = log2_binomial(nT, k);
        for (int u = 1; u <= k; ++u) support_sizes.push_back(u);
    } else {
        const int k_t = model.k_t, k_s = model.k_s;
        if (k_t < 1 || k_s < 1 || k_t > T || k_s > n)
            throw InfeasibleError("sufficient_rate_distributed: structured budgets out of range");
        k = k_t * k_s;
        log2_theta = swap_structured_indices
                         ? log2_binomial(n, k_s) + log2_binomial(T, k_t)
                         : log2_binomial(n, k_t) + log2_binomial(T, k_s);
        for (int ut = 1; ut <= k_t; ++ut)
            for (int us = 1; us <= k_s; ++us) support_sizes.push_back(ut * us);
        std::sort(support_sizes.begin(), support_sizes.end());
        support_sizes.erase(std::unique(support_sizes.begin(), support_sizes.end()),
                            support_sizes.end());
    }
    if (std::isinf(log2_theta))
        throw InfeasibleError("sufficient_rate_distributed: no valid support sets");
    double best = 0.0;
    for (int u : support_sizes) {
        const double term = (1.0 + eps) * k / (static_cast<double>(u) * nT) *
                            (log2_theta + u * std::log2(double(l)));
        best = std::max(best, term);
    }
    return best;
}

// Simulation-time resolution rule: l = max(floor((1/T) 2^(T R / (k (1+eps)))), 2).
// Saturates instead of overflowing; callers cap the result for feasibility.
inline int64_t level_budget(int T, int k, double rate, double eps) {
    if (T < 1 || k < 1 || rate <= 0.0 || eps <= 0.0)
        throw std::invalid_argument("level_budget: bad parameters");
    const double expo = static_cast<double>(T) * rate / (k * (1.0 + eps));
    const double raw = std::exp2(expo) / static_cast<double>(T);
    if (!(raw < 9.0e18)) return std::numeric_limits<int64_t>::max();
    return std::max<int64_t>(static_cast<int64_t>(std::floor(raw)), 2);
}

struct RepetitionFeasibility {
    double epsilon_prime;  // 1 / (ln2 log2(k/ln2)) - 1
    double required;       // max(epsilon_prime, 0), the value to report
};

// Lower bound on the rate-slack epsilon needed so that enough distinct
// codewords exist for duplicate-free generation.
inline RepetitionFeasibility repetition_feasibility(int k) {
    if (k < 1) throw std::invalid_argument("repetition_feasibility: k must be >= 1");
    const double denom = M_LN2 * std::log2(k / M_LN2);
    if (denom <= 0.0)
        throw InfeasibleError("repetition_feasibility: log2(k/ln2) <= 0");
    RepetitionFeasibility out;
    out.epsilon_prime = 1.0 / denom - 1.0;
    out.required = std::max(out.epsilon_prime, 0.0);
    return out;
}

// Codeword-length multiplier compensating asymmetric bit flips:
//   1 / ((1-q) (1-u)^2).
inline double noisy_length_factor(double q, double u) {
    if (!(q >= 0.0 && q < 0.5) || !(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("noisy_length_factor: need 0 <= q < 1/2, 0 <= u < 1");
    return 1.0 / ((1.0 - q) * (1.0 - u) * (1.0 - u));
}

}  // namespace squats

#endif
