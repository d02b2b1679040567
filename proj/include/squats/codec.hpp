#ifndef SQUATS_CODEC_HPP
#define SQUATS_CODEC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "squats/bitvec.hpp"
#include "squats/codebook.hpp"
#include "squats/quantizer.hpp"
#include "squats/rates.hpp"
#include "squats/rng.hpp"
#include "squats/signal.hpp"

namespace squats {

using Register = BitVec;

// Asymmetric bit-flip model on the register: a 0 becomes 1 with probability q,
// a 1 becomes 0 with probability u.
struct NoiseModel {
    double q = 0.0;
    double u = 0.0;

    void validate() const {
        if (!(q >= 0.0 && q < 0.5) || !(u >= 0.0 && u < 1.0))
            throw std::invalid_argument("NoiseModel: need 0 <= q < 1/2, 0 <= u < 1");
    }
};

// One recovered (level, bin) pair; level is 1-based, bin 0-based.
struct Placement {
    uint32_t level;
    uint32_t bin;

    friend bool operator==(const Placement&, const Placement&) = default;
};

struct DecodeResult {
    std::vector<double> signal;
    std::vector<Placement> support;  // sorted by bin
    double log_likelihood = std::numeric_limits<double>::quiet_NaN();
    bool exact_match = false;         // noiseless search found an OR-exact subset
    bool used_noisy_fallback = false; // no exact subset; scored with fallback noise
    bool budget_exceeded = false;     // search stopped early, result is partial
    uint64_t candidates_examined = 0;
    int64_t bits_used = 0;
};

// Serial encoder: quantize each sample in order, select the matching codeword
// from the sample's bin (the shared zero word for a zero sample) and OR it
// into the register. One pass, no sample revisited.
inline Register encode(const SparseSignal& s, const Codebook& cb,
                       const ScalarQuantizer& qz) {
    if (s.length() != static_cast<int>(cb.bins()))
        throw std::invalid_argument("encode: signal length must equal codebook bins");
    if (qz.levels() != static_cast<int>(cb.levels()))
        throw std::invalid_argument("encode: quantizer levels must equal codebook levels");
    Register reg(cb.bits());
    for (int i = 0; i < s.length(); ++i) {
        const int j = qz.quantize(s.values[i]).index;
        if (j != 0) reg.or_words(cb.codeword(j, i));
    }
    return reg;
}

// Exploration variant: each OR update is followed by an independent round of
// bit flips. The benchmark scenarios instead corrupt the final register once.
inline Register encode_with_per_step_noise(const SparseSignal& s, const Codebook& cb,
                                           const ScalarQuantizer& qz,
                                           const NoiseModel& noise, Rng& rng) {
    noise.validate();
    if (s.length() != static_cast<int>(cb.bins()))
        throw std::invalid_argument("encode: signal length must equal codebook bins");
    if (qz.levels() != static_cast<int>(cb.levels()))
        throw std::invalid_argument("encode: quantizer levels must equal codebook levels");
    Register reg(cb.bits());
    for (int i = 0; i < s.length(); ++i) {
        const int j = qz.quantize(s.values[i]).index;
        if (j != 0) reg.or_words(cb.codeword(j, i));
        for (uint32_t bit = 0; bit < cb.bits(); ++bit) {
            if (reg.test(bit)) {
                if (rng.bernoulli(noise.u)) reg.reset(bit);
            } else {
                if (rng.bernoulli(noise.q)) reg.set(bit);
            }
        }
    }
    return reg;
}

// All (level, bin) pairs whose codeword is covered by the register, i.e. has
// no 1 where the register has 0. Every codeword that was OR-ed in survives.
inline std::vector<Placement> eliminate(const Register& reg, const Codebook& cb) {
    if (reg.size() != cb.bits())
        throw std::invalid_argument("eliminate: register length must equal codeword length");
    std::vector<Placement> out;
    for (uint32_t i = 0; i < cb.bins(); ++i)
        for (uint32_t j = 1; j <= cb.levels(); ++j)
            if (covers(reg, cb.codeword(j, i))) out.push_back({j, i});
    return out;
}

struct MlOptions {
    std::optional<NoiseModel> noise;       // set => noisy maximum-likelihood mode
    NoiseModel fallback_noise{0.01, 0.01}; // scoring noise when no exact match exists
    uint64_t search_budget = 2'000'000;    // max candidate subsets examined
    bool exact = false;                    // disable pruning/capping (tiny instances)
    int max_candidates_per_bin = 4;        // cap applied only when over budget
    double prune_quantile = 1.0 - 1e-6;    // binomial quantile for the noisy prune
};

namespace detail {

struct BinCandidates {
    uint32_t bin;
    std::vector<uint32_t> levels;  // ascending
};

// Per-bit log likelihood of observing y given union bit z under (q, u):
//   z=1: P(y=1) = 1-u;  z=0: P(y=1) = q.
struct LogLik {
    double l1u, lu, lq, l1q;
    bool u_zero, q_zero;

    explicit LogLik(const NoiseModel& n)
        : l1u(std::log1p(-n.u)),
          lu(n.u > 0.0 ? std::log(n.u) : 0.0),
          lq(n.q > 0.0 ? std::log(n.q) : 0.0),
          l1q(std::log1p(-n.q)),
          u_zero(n.u <= 0.0),
          q_zero(n.q <= 0.0) {}

    double score(size_t n11, size_t n10, size_t n01, size_t n00) const {
        double s = static_cast<double>(n11) * l1u + static_cast<double>(n00) * l1q;
        if (n10)
            s = u_zero ? -std::numeric_limits<double>::infinity()
                       : s + static_cast<double>(n10) * lu;
        if (n01)
            s = q_zero ? -std::numeric_limits<double>::infinity()
                       : s + static_cast<double>(n01) * lq;
        return s;
    }
};

// Exact number of nonempty subsets of at most k bins with one candidate each:
// DP over the product of (1 + c_i x), coefficients summed through degree k.
// Saturates at `cap` to keep the arithmetic bounded.
inline uint64_t count_subsets(const std::vector<BinCandidates>& bins, int k,
                              uint64_t cap) {
    std::vector<uint64_t> coeff(static_cast<size_t>(k) + 1, 0);
    coeff[0] = 1;
    for (const auto& bc : bins) {
        const uint64_t c = bc.levels.size();
        for (int d = k; d >= 1; --d) {
            const uint64_t add = coeff[d - 1] > cap / std::max<uint64_t>(c, 1)
                                     ? cap
                                     : coeff[d - 1] * c;
            coeff[d] = std::min(cap, coeff[d] + add);
        }
    }
    uint64_t total = 0;
    for (int d = 1; d <= k; ++d) total = std::min(cap, total + coeff[d]);
    return total;
}

// Smallest t with P(Binomial(w, p) <= t) >= quantile.
inline uint32_t binomial_upper_quantile(uint32_t w, double p, double quantile) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return w;
    double pmf = std::pow(1.0 - p, static_cast<double>(w));
    double cdf = pmf;
    uint32_t t = 0;
    const double ratio = p / (1.0 - p);
    while (cdf < quantile && t < w) {
        pmf *= static_cast<double>(w - t) / static_cast<double>(t + 1) * ratio;
        cdf += pmf;
        ++t;
    }
    return t;
}

// Walks subsets of at most max_k bins, one candidate level per chosen bin, in
// canonical order: cardinality ascending, bin combinations lexicographic,
// level odometer with the last position fastest. Under this order the first
// exact match is the minimum-cardinality, lexicographically smallest one,
// which is the deterministic tie-break contract.
//
// visit(chosen, z_words) is called for every subset with z = OR of the chosen
// codewords; returning false stops the walk.
template <typename Visit>
void for_each_subset(const Codebook& cb, const std::vector<BinCandidates>& bins,
                     int max_k, Visit&& visit) {
    const uint32_t stride = cb.words_per_codeword();
    const int B = static_cast<int>(bins.size());
    std::vector<std::vector<uint64_t>> acc(
        static_cast<size_t>(max_k) + 1, std::vector<uint64_t>(stride, 0));
    std::vector<Placement> chosen;
    chosen.reserve(max_k);

    if (!visit(chosen, std::span<const uint64_t>(acc[0].data(), stride))) return;

    bool stop = false;
    auto walk = [&](auto&& self, int first_bin, int remaining) -> void {
        if (stop) return;
        const int depth = static_cast<int>(chosen.size());
        for (int bi = first_bin; bi <= B - remaining; ++bi) {
            const auto& bc = bins[bi];
            for (uint32_t lvl : bc.levels) {
                const auto cw = cb.codeword(lvl, bc.bin);
                auto& next = acc[depth + 1];
                const auto& prev = acc[depth];
                for (uint32_t w = 0; w < stride; ++w) next[w] = prev[w] | cw[w];
                chosen.push_back({lvl, bc.bin});
                if (remaining == 1) {
                    if (!visit(chosen, std::span<const uint64_t>(next.data(), stride)))
                        stop = true;
                } else {
                    self(self, bi + 1, remaining - 1);
                }
                chosen.pop_back();
                if (stop) return;
            }
        }
    };
    for (int card = 1; card <= max_k && card <= B && !stop; ++card)
        walk(walk, 0, card);
}

inline DecodeResult make_result(const Codebook& cb, const ScalarQuantizer& qz,
                                const std::vector<Placement>& support) {
    DecodeResult r;
    r.signal.assign(cb.bins(), 0.0);
    r.support = support;
    std::sort(r.support.begin(), r.support.end(),
              [](const Placement& a, const Placement& b) { return a.bin < b.bin; });
    for (const Placement& p : r.support) r.signal[p.bin] = qz.level_value(p.level);
    r.bits_used = cb.bits();
    return r;
}

// Noisy maximum-likelihood search over a pruned candidate set. Candidates are
// codewords whose 1s landing on zero bits of y do not exceed the binomial
// quantile for weight w under flip rate u; if enumerating them would blow the
// budget, each bin keeps only its top few by singleton likelihood.
inline DecodeResult decode_ml_noisy(const Register& reg, const Codebook& cb, int k,
                                    const ScalarQuantizer& qz, const NoiseModel& noise,
                                    const MlOptions& opt, bool fallback_flag) {
    const LogLik ll(noise);
    const size_t b = cb.bits();
    const size_t y1 = reg.count();
    auto y = reg.words();

    std::map<uint32_t, uint32_t> quantile_cache;
    auto threshold_for = [&](uint32_t w) {
        auto it = quantile_cache.find(w);
        if (it != quantile_cache.end()) return it->second;
        const uint32_t t = binomial_upper_quantile(w, noise.u, opt.prune_quantile);
        quantile_cache.emplace(w, t);
        return t;
    };

    auto singleton_score = [&](std::span<const uint64_t> cw) {
        const size_t n1 = count_and(cw, cw);
        const size_t n11 = count_and(cw, y);
        const size_t n10 = n1 - n11;
        const size_t n01 = y1 - n11;
        return ll.score(n11, n10, n01, b - n11 - n10 - n01);
    };

    std::vector<BinCandidates> bins;
    for (uint32_t i = 0; i < cb.bins(); ++i) {
        BinCandidates bc{i, {}};
        for (uint32_t j = 1; j <= cb.levels(); ++j) {
            const auto cw = cb.codeword(j, i);
            if (!opt.exact) {
                const uint32_t w = static_cast<uint32_t>(count_and(cw, cw));
                if (count_andnot(cw, y) > threshold_for(w)) continue;
            }
            bc.levels.push_back(j);
        }
        if (!bc.levels.empty()) bins.push_back(std::move(bc));
    }

    // If enumerating the pruned set would exceed the budget, keep only the
    // strongest few singletons per bin, and walk the bins strongest-first so
    // a budget-truncated search still visits the promising subsets.
    if (!opt.exact && !bins.empty() &&
        count_subsets(bins, k, opt.search_budget) >= opt.search_budget) {
        std::vector<double> bin_best(bins.size(),
                                     -std::numeric_limits<double>::infinity());
        for (size_t bi = 0; bi < bins.size(); ++bi) {
            auto& bc = bins[bi];
            std::vector<std::pair<double, uint32_t>> scored;
            scored.reserve(bc.levels.size());
            for (uint32_t lvl : bc.levels)
                scored.emplace_back(-singleton_score(cb.codeword(lvl, bc.bin)), lvl);
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            bin_best[bi] = -scored.front().first;
            if (scored.size() > static_cast<size_t>(opt.max_candidates_per_bin))
                scored.resize(static_cast<size_t>(opt.max_candidates_per_bin));
            bc.levels.clear();
            for (const auto& [neg, lvl] : scored) bc.levels.push_back(lvl);
            std::sort(bc.levels.begin(), bc.levels.end());
        }
        std::vector<size_t> order(bins.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return bin_best[a] != bin_best[b] ? bin_best[a] > bin_best[b]
                                              : bins[a].bin < bins[b].bin;
        });
        std::vector<BinCandidates> reordered;
        reordered.reserve(bins.size());
        for (size_t i : order) reordered.push_back(std::move(bins[i]));
        bins = std::move(reordered);
    }

    double best = -std::numeric_limits<double>::infinity();
    std::vector<Placement> best_support;
    uint64_t examined = 0;
    bool exceeded = false;

    for_each_subset(cb, bins, k, [&](const std::vector<Placement>& chosen,
                                     std::span<const uint64_t> z) {
        if (examined >= opt.search_budget) {
            exceeded = true;
            return false;
        }
        ++examined;
        const size_t n1 = count_and(z, z);
        const size_t n11 = count_and(z, y);
        const size_t n10 = n1 - n11;
        const size_t n01 = y1 - n11;
        const double s = ll.score(n11, n10, n01, b - n11 - n10 - n01);
        if (s > best) {
            best = s;
            best_support = chosen;
        }
        return true;
    });

    DecodeResult r = make_result(cb, qz, best_support);
    r.log_likelihood = best;
    r.used_noisy_fallback = fallback_flag;
    r.budget_exceeded = exceeded;
    r.candidates_examined = examined;
    return r;
}

}  // namespace detail

// Maximum-likelihood decoder. Noiseless mode searches subsets of at most k
// covered codewords, one per bin, whose OR reproduces the register exactly;
// covered-codeword pruning is likelihood-exact because an uncovered codeword
// has zero likelihood under the noiseless channel. Ties resolve to the
// smallest support, then the lexicographically smallest (bin, level)
// sequence. With a NoiseModel set, maximizes the bit-flip log likelihood over
// a pruned candidate set instead.
DecodeResult decode_ml(const Register& reg, const Codebook& cb, int k,
                       const ScalarQuantizer& qz, const MlOptions& opt = {});

// Column-matching decoder: eliminate uncovered codewords, then declare one
// surviving codeword per bin (chosen uniformly at random when a bin keeps
// several); bins with no survivor decode to the zero level.
inline DecodeResult decode_coma(const Register& reg, const Codebook& cb,
                                const ScalarQuantizer& qz, Rng& rng) {
    if (qz.levels() != static_cast<int>(cb.levels()))
        throw std::invalid_argument("decode_coma: quantizer levels must equal codebook levels");
    const std::vector<Placement> survivors = eliminate(reg, cb);
    std::vector<Placement> picked;
    size_t i = 0;
    while (i < survivors.size()) {
        size_t j = i;
        while (j < survivors.size() && survivors[j].bin == survivors[i].bin) ++j;
        picked.push_back(survivors[i + rng.below(j - i)]);
        i = j;
    }
    DecodeResult r = detail::make_result(cb, qz, picked);
    r.exact_match = false;
    return r;
}

inline DecodeResult decode_ml(const Register& reg, const Codebook& cb, int k,
                              const ScalarQuantizer& qz, const MlOptions& opt) {
    if (k < 0) throw std::invalid_argument("decode_ml: k must be >= 0");
    if (qz.levels() != static_cast<int>(cb.levels()))
        throw std::invalid_argument("decode_ml: quantizer levels must equal codebook levels");
    if (reg.size() != cb.bits())
        throw std::invalid_argument("decode_ml: register length must equal codeword length");

    if (opt.noise) {
        opt.noise->validate();
        return detail::decode_ml_noisy(reg, cb, k, qz, *opt.noise, opt, false);
    }

    // Noiseless: restrict to covered codewords and look for an OR-exact subset.
    std::vector<detail::BinCandidates> bins;
    {
        const std::vector<Placement> survivors = eliminate(reg, cb);
        size_t i = 0;
        while (i < survivors.size()) {
            detail::BinCandidates bc{survivors[i].bin, {}};
            while (i < survivors.size() && survivors[i].bin == bc.bin)
                bc.levels.push_back(survivors[i++].level);
            bins.push_back(std::move(bc));
        }
    }

    // If even the union of all survivors cannot reproduce the register, no
    // exact match exists and the search can be skipped.
    bool union_covers = true;
    {
        BitVec all(cb.bits());
        for (const auto& bc : bins)
            for (uint32_t lvl : bc.levels) all.or_words(cb.codeword(lvl, bc.bin));
        union_covers = (all == reg);
    }

    uint64_t examined = 0;
    bool exceeded = false;
    std::vector<Placement> match;
    bool found = false;

    if (union_covers) {
        detail::for_each_subset(cb, bins, k, [&](const std::vector<Placement>& chosen,
                                                 std::span<const uint64_t> z) {
            if (examined >= opt.search_budget) {
                exceeded = true;
                return false;
            }
            ++examined;
            const uint64_t* r = reg.data();
            for (size_t w = 0; w < z.size(); ++w)
                if (z[w] != r[w]) return true;
            match = chosen;
            found = true;
            return false;
        });
    }

    if (found) {
        DecodeResult r = detail::make_result(cb, qz, match);
        r.exact_match = true;
        r.candidates_examined = examined;
        return r;
    }

    // No exact subset (register corrupted or true sparsity above k): score
    // with the configured fallback noise and flag the output.
    DecodeResult r = detail::decode_ml_noisy(reg, cb, k, qz, opt.fallback_noise, opt, true);
    r.candidates_examined += examined;
    r.budget_exceeded |= exceeded;
    return r;
}

enum class DecoderKind { Ml, Coma };

struct FragmentParams {
    int groups = 1;
    int design_k = 1;            // whole-signal design sparsity
    int per_group_k = 0;         // 0 => ceil(design_k / groups)
    uint32_t per_group_levels = 2;
    int64_t per_group_bits = 1;
    uint64_t seed = 0;
    DecoderKind decoder = DecoderKind::Coma;
    MlOptions ml;
};

// Splits the signal into `groups` contiguous blocks (the last one zero padded)
// and runs an independent encode/decode per block with its own codebook. The
// total bit budget is groups * per_group_bits.
inline DecodeResult fragment_pipeline(const SparseSignal& s, const FragmentParams& fp,
                                      const ScalarQuantizer& qz, Rng& rng) {
    if (fp.groups < 1) throw std::invalid_argument("fragment_pipeline: groups must be >= 1");
    const int T = s.length();
    const int group_len = (T + fp.groups - 1) / fp.groups;
    const int k_g = fp.per_group_k > 0 ? fp.per_group_k
                                       : (fp.design_k + fp.groups - 1) / fp.groups;

    DecodeResult out;
    out.signal.assign(T, 0.0);
    out.exact_match = true;
    for (int g = 0; g < fp.groups; ++g) {
        SparseSignal part;
        part.values.assign(group_len, 0.0);
        part.support_budget = k_g;
        for (int t = 0; t < group_len; ++t) {
            const int src = g * group_len + t;
            if (src < T) part.values[t] = s.values[src];
        }
        Codebook cb = Codebook::generate({static_cast<uint32_t>(group_len),
                                          fp.per_group_levels,
                                          static_cast<uint32_t>(std::max(k_g, 1)),
                                          static_cast<uint32_t>(fp.per_group_bits),
                                          derive_seed(fp.seed, static_cast<uint64_t>(g)),
                                          false});
        const Register reg = encode(part, cb, qz);
        DecodeResult dr = fp.decoder == DecoderKind::Coma
                              ? decode_coma(reg, cb, qz, rng)
                              : decode_ml(reg, cb, k_g, qz, fp.ml);
        for (int t = 0; t < group_len; ++t) {
            const int dst = g * group_len + t;
            if (dst < T) out.signal[dst] = dr.signal[t];
        }
        for (const Placement& p : dr.support) {
            const uint32_t dst = static_cast<uint32_t>(g * group_len) + p.bin;
            if (dst < static_cast<uint32_t>(T)) out.support.push_back({p.level, dst});
        }
        out.exact_match &= dr.exact_match;
        out.used_noisy_fallback |= dr.used_noisy_fallback;
        out.budget_exceeded |= dr.budget_exceeded;
        out.candidates_examined += dr.candidates_examined;
        out.bits_used += fp.per_group_bits;
    }
    return out;
}

}  // namespace squats

#endif
