#ifndef SQUATS_SIGNAL_HPP
#define SQUATS_SIGNAL_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "squats/errors.hpp"
#include "squats/rng.hpp"

namespace squats {

// Length-T sequence with at most support_budget nonzero entries.
struct SparseSignal {
    std::vector<double> values;
    int support_budget = 0;

    int length() const { return static_cast<int>(values.size()); }

    int nonzero_count() const {
        int c = 0;
        for (double v : values)
            if (v != 0.0) ++c;
        return c;
    }
};

// k_true indices chosen uniformly without replacement, filled with standard
// Gaussian values; everything else is exactly zero.
inline SparseSignal gen_signal(int T, int k_true, Rng& rng) {
    if (T < 0 || k_true < 0 || k_true > T)
        throw std::invalid_argument("gen_signal: need 0 <= k_true <= T");
    SparseSignal s;
    s.values.assign(T, 0.0);
    s.support_budget = k_true;
    for (uint32_t idx : rng.sample_indices(static_cast<uint32_t>(T),
                                           static_cast<uint32_t>(k_true)))
        s.values[idx] = rng.normal();
    return s;
}

inline double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("mse: length mismatch");
    if (a.empty()) return 0.0;
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

// Joint sparsity across an ensemble of n signals: either an overall budget k
// on the whole n*T grid, or per-signal temporal budget k_t combined with a
// per-time spatial budget k_s (so k = k_s * k_t).
struct JointSparsityModel {
    enum class Kind { Overall, Structured };
    Kind kind = Kind::Overall;
    int k = 0;    // overall budget; for Structured this is k_s * k_t
    int k_t = 0;  // nonzero times per signal
    int k_s = 0;  // nonzero signals per time instant

    static JointSparsityModel overall(int k) {
        JointSparsityModel m;
        m.kind = Kind::Overall;
        m.k = k;
        return m;
    }

    static JointSparsityModel structured(int k_t, int k_s) {
        JointSparsityModel m;
        m.kind = Kind::Structured;
        m.k_t = k_t;
        m.k_s = k_s;
        m.k = k_t * k_s;
        return m;
    }
};

// Each signal's values are i.i.d. standard Gaussian on its support. For the
// structured model the support is a product grid of k_s active signals and
// k_t active times, which meets both per-row and per-column budgets.
inline std::vector<SparseSignal> gen_joint_sparse(int n, int T,
                                                  const JointSparsityModel& model,
                                                  Rng& rng) {
    if (n < 1 || T < 1) throw std::invalid_argument("gen_joint_sparse: need n, T >= 1");
    std::vector<SparseSignal> out(n);
    for (auto& s : out) s.values.assign(T, 0.0);

    if (model.kind == JointSparsityModel::Kind::Overall) {
        if (model.k < 0 || model.k > n * T)
            throw InfeasibleError("gen_joint_sparse: overall k exceeds n*T");
        for (auto& s : out) s.support_budget = model.k;
        for (uint32_t flat : rng.sample_indices(static_cast<uint32_t>(n * T),
                                                static_cast<uint32_t>(model.k)))
            out[flat / T].values[flat % T] = rng.normal();
        return out;
    }

    if (model.k_t < 0 || model.k_t > T || model.k_s < 0 || model.k_s > n)
        throw InfeasibleError("gen_joint_sparse: structured budgets exceed dimensions");
    const auto rows = rng.sample_indices(static_cast<uint32_t>(n),
                                         static_cast<uint32_t>(model.k_s));
    const auto cols = rng.sample_indices(static_cast<uint32_t>(T),
                                         static_cast<uint32_t>(model.k_t));
    for (auto& s : out) s.support_budget = model.k_t;
    for (uint32_t r : rows)
        for (uint32_t c : cols) out[r].values[c] = rng.normal();
    return out;
}

}  // namespace squats

#endif
