// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured numbers. Built as its own binary so
// `ctest -R acceptance` runs exactly these checks.

#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "squats/bench.hpp"

using namespace squats;

namespace {

constexpr int kThreads = 2;

void report(int criterion, const char* name, bool ok) {
    std::printf("[criterion %d] %-36s %s\n", criterion, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

// Independent exhaustive ML: enumerate every bin subset of size <= k and
// every level choice, collect all OR-exact matches, pick the tie-break
// winner by explicit comparison over the full match list.
std::vector<Placement> exhaustive_ml(const Register& reg, const Codebook& cb, int k) {
    const int T = static_cast<int>(cb.bins());
    const int l = static_cast<int>(cb.levels());
    std::vector<std::vector<Placement>> matches;
    std::vector<int> bins;
    auto levels_walk = [&](auto&& self, size_t pos, std::vector<Placement>& cur) -> void {
        if (pos == bins.size()) {
            BitVec z(cb.bits());
            for (const Placement& p : cur) z.or_words(cb.codeword(p.level, p.bin));
            if (z == reg) matches.push_back(cur);
            return;
        }
        for (int j = 1; j <= l; ++j) {
            cur.push_back({static_cast<uint32_t>(j), static_cast<uint32_t>(bins[pos])});
            self(self, pos + 1, cur);
            cur.pop_back();
        }
    };
    auto bins_walk = [&](auto&& self, int start, int remaining) -> void {
        if (remaining == 0) {
            std::vector<Placement> cur;
            levels_walk(levels_walk, 0, cur);
            return;
        }
        for (int b = start; b <= T - remaining; ++b) {
            bins.push_back(b);
            self(self, b + 1, remaining - 1);
            bins.pop_back();
        }
    };
    for (int card = 0; card <= k; ++card) bins_walk(bins_walk, 0, card);
    auto seq_less = [](const std::vector<Placement>& a, const std::vector<Placement>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i].bin != b[i].bin) return a[i].bin < b[i].bin;
            if (a[i].level != b[i].level) return a[i].level < b[i].level;
        }
        return false;
    };
    REQUIRE_FALSE(matches.empty());
    return *std::min_element(matches.begin(), matches.end(), seq_less);
}

double find_row_mse(const ResultTable& t, double rate, const std::string& decoder) {
    for (const auto& r : t.rows)
        if (r.rate == rate && r.decoder == decoder) return r.mse_mean;
    return std::numeric_limits<double>::quiet_NaN();
}

// Minimal rate on the grid whose measured MSE is at or below the target.
double minimal_rate(const ResultTable& t, const std::string& decoder, double target) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : t.rows)
        if (r.decoder == decoder && r.mse_mean <= target) best = std::min(best, r.rate);
    return best;
}

}  // namespace

TEST_CASE("criterion 1: pruned ML equals exhaustive ML") {
    const int T = 8, k = 2, l = 2;
    const auto b = static_cast<uint32_t>(bits_for_rate(sufficient_rate_ml(T, k, l, 1.0), T));
    const ScalarQuantizer qz(l);
    Rng seeds(101);
    bool ok = true;
    for (int inst = 0; inst < 200; ++inst) {
        const Codebook cb = Codebook::generate({T, l, k, b, seeds.u64(), false});
        Rng rng(seeds.u64());
        const SparseSignal s = gen_signal(T, k, rng);
        const Register reg = encode(s, cb, qz);
        const auto expect = exhaustive_ml(reg, cb, k);
        const DecodeResult got = decode_ml(reg, cb, k, qz);
        ok &= got.exact_match && got.support == expect;
    }
    report(1, "oracle equivalence (200 instances)", ok);
    CHECK(ok);
}

TEST_CASE("criterion 2: single-signal MSE vs rate and CS baselines") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::Single;
    cfg.T = 100;
    cfg.k_design = 3;
    cfg.rates = {0.5, 1.0};
    cfg.trials = 100;
    cfg.seed = 2025;
    cfg.decoders = {DecoderKind::Ml};
    cfg.eps_policy = EpsPolicy::AutoGrid;
    cfg.baseline_qiht = true;
    cfg.baseline_fista = true;
    cfg.threads = kThreads;
    const ResultTable t = run_sweep(cfg);

    const double ml_05 = find_row_mse(t, 0.5, "ml");
    const double ml_10 = find_row_mse(t, 1.0, "ml");
    const double qiht_10 = find_row_mse(t, 1.0, "qiht");
    const double fista_10 = find_row_mse(t, 1.0, "fista");
    std::printf("    ml@0.5=%.3e ml@1.0=%.3e qiht@1.0=%.3e fista@1.0=%.3e\n",
                ml_05, ml_10, qiht_10, fista_10);

    const bool ok_05 = ml_05 <= 1e-2;
    const bool ok_10 = ml_10 <= 1e-4;
    const bool ok_gap_qiht = qiht_10 >= 10.0 * ml_10;
    const bool ok_gap_fista = fista_10 >= 10.0 * ml_10;
    report(2, "ML MSE <= 1e-2 at R=0.5", ok_05);
    report(2, "ML MSE <= 1e-4 at R=1.0", ok_10);
    report(2, "QIHT gap >= 10x at R=1.0", ok_gap_qiht);
    report(2, "FISTA gap >= 10x at R=1.0", ok_gap_fista);
    CHECK(ok_05);
    CHECK(ok_10);
    CHECK(ok_gap_qiht);
    CHECK(ok_gap_fista);
}

TEST_CASE("criterion 3: direct scalar baseline near unit MSE") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::Single;
    cfg.T = 100;
    cfg.k_design = 3;
    cfg.rates = {1.0};
    cfg.trials = 100;
    cfg.seed = 33;
    cfg.decoders = {DecoderKind::Ml};
    cfg.eps_policy = EpsPolicy::Fixed;
    cfg.baseline_direct = true;
    cfg.threads = kThreads;
    const ResultTable t = run_sweep(cfg);
    const double direct = find_row_mse(t, 1.0, "direct");
    std::printf("    direct@1.0=%.4f\n", direct);
    const bool ok = direct >= 0.5 && direct <= 1.2;
    report(3, "direct MSE in [0.5, 1.2] at R=1", ok);
    CHECK(ok);
}

TEST_CASE("criterion 4: CoMa failure fraction within the T^-eps bound") {
    const int T = 50, k = 2, l = 4;
    const double eps = 0.5;
    const auto cr = sufficient_rate_coma(T, k, l, eps);
    const auto b = static_cast<uint32_t>(bits_for_rate(cr.rate, T));
    const Codebook cb = Codebook::generate({T, l, k, b, 404, false});
    const ScalarQuantizer qz(l);
    const int trials = 2000;
    std::vector<char> bad(trials, 0);
    parallel_for(trials, kThreads, [&](int64_t t) {
        Rng sig(derive_seed(404, 1, t));
        Rng pick(derive_seed(404, 2, t));
        const SparseSignal s = gen_signal(T, k, sig);
        const DecodeResult r = decode_coma(encode(s, cb, qz), cb, qz, pick);
        for (int i = 0; i < T; ++i)
            if (r.signal[i] != qz.quantize(s.values[i]).value) {
                bad[t] = 1;
                break;
            }
    });
    double frac = 0.0;
    for (char c : bad) frac += c;
    frac /= trials;
    const double bound = cr.failure_bound;
    const double sigma = std::sqrt(bound * (1.0 - bound) / trials);
    std::printf("    R=%.4f b=%u error fraction=%.4f bound+3sigma=%.4f\n", cr.rate, b,
                frac, bound + 3.0 * sigma);
    const bool ok = frac <= bound + 3.0 * sigma;
    report(4, "CoMa support-error fraction", ok);
    CHECK(ok);
}

TEST_CASE("criterion 5: distributed bit-exactness and encoder cuts") {
    const int n = 10, T = 100, k = 3;
    const uint32_t b = 200, l = 4;
    const Codebook cb = Codebook::generate({n * T, l, k, b, 505, false});
    const ScalarQuantizer qz(l);
    bool ok_bits = true, ok_cut = true;
    Rng seeds(505);
    for (int run = 0; run < 500; ++run) {
        Rng rng(seeds.u64());
        const NetworkGraph g = random_layered_dag(n, 2, 5, 0.3, rng);
        const auto failures = sample_noncut_failures(g, 0.25, rng);
        const auto signals = gen_joint_sparse(n, T, JointSparsityModel::overall(k), rng);
        const auto regs = encode_distributed(signals, cb, qz);

        const Register y = simulate(g, regs, failures);
        const Register mono = encode(concat_ensemble(signals), cb, qz);
        ok_bits &= y == mono;

        // cut one encoder entirely: all outgoing edges of that node fail
        const int cut = static_cast<int>(rng.below(n));
        const int cut_id = g.encoder_indices()[cut];
        std::vector<int> cut_failures;
        for (size_t e = 0; e < g.edges.size(); ++e)
            if (g.edges[e].from == g.nodes[cut_id].id) cut_failures.push_back(int(e));
        const Register y_cut = simulate(g, regs, cut_failures);

        const DecodeResult full = decode_ml(y, cb, k, qz);
        const DecodeResult part = decode_ml(y_cut, cb, k, qz);
        for (int m = 0; m < n; ++m) {
            for (int i = 0; i < T; ++i) {
                if (m == cut) {
                    ok_cut &= part.signal[m * T + i] == 0.0;
                } else {
                    ok_cut &= part.signal[m * T + i] == full.signal[m * T + i];
                }
            }
        }
    }
    report(5, "decoder word equals monolithic OR", ok_bits);
    report(5, "cut encoder: rest intact, cut zero", ok_cut);
    CHECK(ok_bits);
    CHECK(ok_cut);
}

TEST_CASE("criterion 6: distributed MSE beats the reported CS floors") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::Distributed;
    cfg.n = 10;
    cfg.T = 100;
    cfg.k_design = 3;
    cfg.sparsity = JointSparsityModel::overall(3);
    cfg.rates = {0.05, 0.1, 0.15};
    cfg.trials = 100;
    cfg.seed = 606;
    cfg.decoders = {DecoderKind::Ml};
    cfg.eps_policy = EpsPolicy::AutoGrid;
    cfg.threads = kThreads;
    const ResultTable t = run_sweep(cfg);
    const double top = find_row_mse(t, 0.15, "ml");
    for (const auto& r : t.rows)
        std::printf("    R=%.3f %s mse=%.3e eps=%.3f l=%lld\n", r.rate, r.decoder.c_str(),
                    r.mse_mean, r.epsilon, static_cast<long long>(r.levels));
    const bool ok_qiht = top < 9e-3;
    const bool ok_fista = top < 4e-2;
    report(6, "top-rate MSE below QIHT floor 9e-3", ok_qiht);
    report(6, "top-rate MSE below FISTA floor 4e-2", ok_fista);
    CHECK(ok_qiht);
    CHECK(ok_fista);
}

TEST_CASE("criterion 7: noise raises the rate needed for 1e-3 MSE") {
    auto sweep = [&](double q, double u, std::vector<double> rates) {
        ExperimentConfig cfg;
        cfg.scenario = (q == 0.0 && u == 0.0) ? Scenario::Single : Scenario::Noisy;
        cfg.T = 50;
        cfg.k_design = 2;
        cfg.rates = std::move(rates);
        // the MSE near the threshold is dominated by rare saturation events,
        // so the estimate needs many trials to concentrate
        cfg.trials = 1000;
        cfg.seed = 707;
        cfg.decoders = {DecoderKind::Ml};
        cfg.eps_policy = EpsPolicy::AutoGrid;
        cfg.noise = {q, u};
        cfg.threads = kThreads;
        return run_sweep(cfg);
    };

    const ResultTable clean =
        sweep(0.0, 0.0, {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.9, 1.0});
    const ResultTable q01 =
        sweep(0.1, 0.1, {1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4});
    const ResultTable q04 = sweep(0.4, 0.1, {2.4, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 7.0, 8.0});

    const double r_clean = minimal_rate(clean, "ml", 1e-3);
    const double r_q01 = minimal_rate(q01, "ml", 1e-3);
    const double r_q04 = minimal_rate(q04, "ml", 1e-3);
    std::printf("    minimal rates for MSE<=1e-3: clean=%.2f q=0.1:%.2f q=0.4:%.2f\n",
                r_clean, r_q01, r_q04);

    const bool ok_clean = std::isfinite(r_clean);
    const bool ok_factor = std::isfinite(r_q01) && r_q01 >= 2.0 * r_clean;
    const bool ok_ordering = r_q04 > r_q01;  // infinite (not reached on grid) also passes
    report(7, "noiseless threshold exists (~0.7)", ok_clean);
    report(7, "q=0.1 threshold >= 2x noiseless", ok_factor);
    report(7, "q=0.4 threshold above q=0.1", ok_ordering);
    CHECK(ok_clean);
    CHECK(ok_factor);
    CHECK(ok_ordering);
}

TEST_CASE("criterion 8: property suite") {
    bool ok_order = true;
    {
        const Codebook cb = Codebook::generate({40, 4, 3, 90, 808, false});
        const ScalarQuantizer qz(4);
        Rng rng(808);
        for (int t = 0; t < 50; ++t) {
            const SparseSignal s = gen_signal(40, 3, rng);
            const Register fwd = encode(s, cb, qz);
            Register rev(cb.bits());
            for (int i = 39; i >= 0; --i) {
                const int j = qz.quantize(s.values[i]).index;
                if (j != 0) rev.or_words(cb.codeword(j, i));
            }
            ok_order &= fwd == rev;
        }
    }
    report(8, "encoder order-invariance", ok_order);

    bool ok_elim = true;
    {
        const Codebook cb = Codebook::generate({30, 3, 2, 70, 809, false});
        const ScalarQuantizer qz(3);
        Rng rng(809);
        for (int t = 0; t < 50; ++t) {
            const SparseSignal s = gen_signal(30, 2, rng);
            const Register reg = encode(s, cb, qz);
            const auto surv = eliminate(reg, cb);
            for (int i = 0; i < 30; ++i) {
                const int j = qz.quantize(s.values[i]).index;
                if (j == 0) continue;
                ok_elim &= std::find(surv.begin(), surv.end(),
                                     Placement{static_cast<uint32_t>(j),
                                               static_cast<uint32_t>(i)}) != surv.end();
            }
        }
    }
    report(8, "elimination no-false-negatives", ok_elim);

    bool ok_rates = true;
    {
        const int Ts[] = {25, 50, 100, 200};
        const int ls[] = {1, 2, 4, 16, 64};
        const double epss[] = {0.1, 0.5, 1.0};
        for (int T : Ts)
            for (int k : {1, 2, 3, 5, 10})
                for (int l : ls)
                    for (double eps : epss)
                        ok_rates &= sufficient_rate_ml(T, k, l, eps) <=
                                    rate_upper_bound(T, k, l, eps) + 1e-12;
        for (int k : {1, 2, 3, 5, 10})
            for (double eps : epss) {
                for (size_t i = 0; i + 1 < std::size(ls); ++i)
                    ok_rates &= sufficient_rate_ml(100, k, ls[i], eps) <
                                sufficient_rate_ml(100, k, ls[i + 1], eps);
                for (size_t i = 0; i + 1 < std::size(Ts); ++i)
                    ok_rates &= sufficient_rate_ml(Ts[i + 1], k, 16, eps) <=
                                sufficient_rate_ml(Ts[i], k, 16, eps) + 1e-12;
            }
    }
    report(8, "rate monotonicity and Thm<=Cor grid", ok_rates);

    const bool ok_budget = level_budget(100, 3, 1.0, 1.0) == 1040;
    report(8, "level_budget(100,3,1,1) == 1040", ok_budget);

    const bool ok_factor = std::abs(noisy_length_factor(0.1, 0.1) - 1.3717) <= 1e-4;
    report(8, "noisy length factor 1.3717", ok_factor);

    const bool ok_rep = repetition_feasibility(1).epsilon_prime > 0.0 &&
                        repetition_feasibility(2).epsilon_prime < 0.0;
    report(8, "repetition feasibility sign flip", ok_rep);

    bool ok_bernoulli;
    {
        const Codebook cb = Codebook::generate({100, 4, 3, 200, 810, false});
        const double p = M_LN2 / 3.0;
        const double sigma = std::sqrt(p * (1 - p) / (100.0 * 4 * 200));
        ok_bernoulli = std::abs(cb.ones_fraction() - p) <= 3.0 * sigma;
    }
    report(8, "codebook Bernoulli mean 3-sigma", ok_bernoulli);

    const double pd = panter_dite_mse([](double x) { return gaussian_pdf(x); }, 0);
    const bool ok_pd = std::abs(pd - M_PI * std::sqrt(3.0) / 2.0) <=
                       0.01 * (M_PI * std::sqrt(3.0) / 2.0);
    report(8, "Panter-Dite Gaussian constant 1%", ok_pd);

    CHECK(ok_order);
    CHECK(ok_elim);
    CHECK(ok_rates);
    CHECK(ok_budget);
    CHECK(ok_factor);
    CHECK(ok_rep);
    CHECK(ok_bernoulli);
    CHECK(ok_pd);
}

TEST_CASE("criterion 9: fragmentation parity at matched bits") {
    const int T = 50, k = 10, G = 10, l = 4;
    const double eps = 0.5;
    const auto cr = sufficient_rate_coma(T, k, l, eps);
    const int64_t total_bits = bits_for_rate(cr.rate, T);
    const int64_t per_group_bits = total_bits / G;
    const ScalarQuantizer qz(l);
    const Codebook whole = Codebook::generate(
        {T, l, k, static_cast<uint32_t>(total_bits), 909, false});

    FragmentParams fp;
    fp.groups = G;
    fp.design_k = k;  // per-group k defaults to 1
    fp.per_group_levels = l;
    fp.per_group_bits = per_group_bits;
    fp.seed = 910;
    fp.decoder = DecoderKind::Coma;

    const int trials = 400;
    std::vector<double> mse_frag(trials), mse_whole(trials);
    parallel_for(trials, kThreads, [&](int64_t t) {
        Rng sig(derive_seed(909, 1, t));
        // evenly split support: one Gaussian nonzero per length-5 group
        SparseSignal s;
        s.values.assign(T, 0.0);
        s.support_budget = k;
        for (int g = 0; g < G; ++g)
            s.values[g * (T / G) + sig.below(T / G)] = sig.normal();

        Rng pick_a(derive_seed(909, 2, t)), pick_b(derive_seed(909, 3, t));
        const DecodeResult frag = fragment_pipeline(s, fp, qz, pick_a);
        const DecodeResult plain = decode_coma(encode(s, whole, qz), whole, qz, pick_b);
        mse_frag[t] = mse(s.values, frag.signal);
        mse_whole[t] = mse(s.values, plain.signal);
        if (frag.bits_used > total_bits)
            throw std::logic_error("fragment pipeline exceeded the bit budget");
    });
    double mf = 0.0, mw = 0.0;
    for (int t = 0; t < trials; ++t) {
        mf += mse_frag[t];
        mw += mse_whole[t];
    }
    mf /= trials;
    mw /= trials;
    std::printf("    bits=%lld fragmented=%.4e unfragmented=%.4e ratio=%.2f\n",
                static_cast<long long>(total_bits), mf, mw, mf / mw);
    const bool ok = mf <= 2.0 * mw && mw <= 2.0 * mf;
    report(9, "fragmented vs whole within 2x", ok);
    CHECK(ok);
}
