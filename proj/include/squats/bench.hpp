#ifndef SQUATS_BENCH_HPP
#define SQUATS_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "squats/baselines.hpp"
#include "squats/channel.hpp"
#include "squats/codec.hpp"
#include "squats/errors.hpp"
#include "squats/network.hpp"
#include "squats/parallel.hpp"
#include "squats/rates.hpp"

namespace squats {

enum class Scenario { Single, Noisy, Distributed, Fragmented, Mismatch };
enum class EpsPolicy { AutoGrid, Fixed, FineSearch };

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::Single: return "single";
        case Scenario::Noisy: return "noisy";
        case Scenario::Distributed: return "distributed";
        case Scenario::Fragmented: return "fragmented";
        default: return "mismatch";
    }
}

struct ExperimentConfig {
    Scenario scenario = Scenario::Single;
    int T = 100;
    int k_design = 3;
    int k_true = -1;  // -1: equal to k_design
    int n = 1;        // encoders (distributed scenario)
    std::vector<double> rates;
    int trials = 100;
    uint64_t seed = 1;
    std::vector<DecoderKind> decoders{DecoderKind::Ml};
    EpsPolicy eps_policy = EpsPolicy::AutoGrid;
    double eps_fixed = 1.0;
    bool baseline_direct = false;
    bool baseline_qiht = false;
    bool baseline_fista = false;
    NoiseModel noise{0.0, 0.0};
    std::string topology;  // optional topology file (distributed scenario)
    JointSparsityModel sparsity = JointSparsityModel::overall(3);
    int64_t max_levels = 4096;
    double q_lo = -2.0, q_hi = 2.0;
    bool centroid = false;
    int groups = 1;                   // fragmented scenario
    std::vector<int> mismatch_true_k; // mismatch scenario sweep
    int threads = 1;
    bool timing = false;  // emit wall times (off keeps the CSV reproducible)
    uint64_t ml_budget = 2'000'000;

    int true_k() const { return k_true < 0 ? k_design : k_true; }

    void validate() const {
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (k_design < 1) throw ConfigError("design k must be >= 1");
        if (T < 1) throw ConfigError("T must be >= 1");
        if (rates.empty()) throw ConfigError("rate grid must not be empty");
        for (size_t i = 1; i < rates.size(); ++i)
            if (!(rates[i] > rates[i - 1]))
                throw ConfigError("rate grid must be strictly increasing");
        if (rates.front() <= 0.0) throw ConfigError("rates must be positive");
        if (scenario == Scenario::Noisy) noise.validate();
        if (scenario == Scenario::Distributed && n < 1)
            throw ConfigError("distributed scenario needs n >= 1");
        if (scenario == Scenario::Fragmented && groups < 1)
            throw ConfigError("fragmented scenario needs groups >= 1");
        if (scenario == Scenario::Mismatch && mismatch_true_k.empty())
            throw ConfigError("mismatch scenario needs a mismatch_true_k list");
        if (decoders.empty()) throw ConfigError("at least one decoder required");
    }

    static ExperimentConfig from_json(const nlohmann::json& j);
};

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("scenario")) {
            const std::string s = j.at("scenario").get<std::string>();
            if (s == "single") c.scenario = Scenario::Single;
            else if (s == "noisy") c.scenario = Scenario::Noisy;
            else if (s == "distributed") c.scenario = Scenario::Distributed;
            else if (s == "fragmented") c.scenario = Scenario::Fragmented;
            else if (s == "mismatch") c.scenario = Scenario::Mismatch;
            else throw ConfigError("unknown scenario: " + s);
        }
        if (j.contains("T")) c.T = j.at("T").get<int>();
        if (j.contains("k")) c.k_design = j.at("k").get<int>();
        if (j.contains("k_true")) c.k_true = j.at("k_true").get<int>();
        if (j.contains("n")) c.n = j.at("n").get<int>();
        if (j.contains("rates")) c.rates = j.at("rates").get<std::vector<double>>();
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
        if (j.contains("decoders")) {
            c.decoders.clear();
            for (const auto& d : j.at("decoders")) {
                const std::string s = d.get<std::string>();
                if (s == "ml") c.decoders.push_back(DecoderKind::Ml);
                else if (s == "coma") c.decoders.push_back(DecoderKind::Coma);
                else throw ConfigError("unknown decoder: " + s);
            }
        }
        if (j.contains("epsilon")) {
            const auto& e = j.at("epsilon");
            const std::string p = e.value("policy", std::string("auto-grid"));
            if (p == "auto-grid") c.eps_policy = EpsPolicy::AutoGrid;
            else if (p == "fixed") c.eps_policy = EpsPolicy::Fixed;
            else if (p == "fine-search") c.eps_policy = EpsPolicy::FineSearch;
            else throw ConfigError("unknown epsilon policy: " + p);
            if (e.contains("value")) c.eps_fixed = e.at("value").get<double>();
        }
        if (j.contains("baselines")) {
            const auto& b = j.at("baselines");
            c.baseline_direct = b.value("direct", false);
            c.baseline_qiht = b.value("qiht", false);
            c.baseline_fista = b.value("fista", false);
        }
        if (j.contains("noise")) {
            c.noise.q = j.at("noise").value("q", 0.0);
            c.noise.u = j.at("noise").value("u", 0.0);
        }
        if (j.contains("topology")) c.topology = j.at("topology").get<std::string>();
        if (j.contains("sparsity")) {
            const auto& s = j.at("sparsity");
            const std::string model = s.value("model", std::string("overall"));
            if (model == "overall")
                c.sparsity = JointSparsityModel::overall(s.value("k", c.k_design));
            else if (model == "structured")
                c.sparsity = JointSparsityModel::structured(s.at("k_t").get<int>(),
                                                            s.at("k_s").get<int>());
            else
                throw ConfigError("unknown sparsity model: " + model);
        }
        if (j.contains("quantizer")) {
            const auto& q = j.at("quantizer");
            c.q_lo = q.value("lo", -2.0);
            c.q_hi = q.value("hi", 2.0);
            c.centroid = q.value("centroid", false);
        }
        if (j.contains("max_levels")) c.max_levels = j.at("max_levels").get<int64_t>();
        if (j.contains("groups")) c.groups = j.at("groups").get<int>();
        if (j.contains("mismatch_true_k"))
            c.mismatch_true_k = j.at("mismatch_true_k").get<std::vector<int>>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
        if (j.contains("timing")) c.timing = j.at("timing").get<bool>();
        if (j.contains("ml_budget")) c.ml_budget = j.at("ml_budget").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

struct ResultRow {
    std::string scenario;
    double rate = 0.0;
    std::string decoder;
    double epsilon = 0.0;
    int64_t levels = 0;
    int64_t bits = 0;
    double mse_mean = 0.0;
    double mse_stderr = 0.0;
    double support_error_rate = 0.0;
    double wall_ms = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

inline std::vector<double> epsilon_grid(EpsPolicy policy, double fixed_value) {
    std::vector<double> out;
    switch (policy) {
        case EpsPolicy::AutoGrid:
            for (int i = 0; i < 4; ++i) out.push_back(0.8 + i * (1.3 - 0.8) / 3.0);
            break;
        case EpsPolicy::FineSearch:
            for (int i = 0; i < 16; ++i) out.push_back(0.3 + i * (2.0 - 0.3) / 15.0);
            break;
        case EpsPolicy::Fixed:
            out.push_back(fixed_value);
            break;
    }
    return out;
}

namespace detail {

struct TrialStats {
    double mse_mean = 0.0;
    double mse_stderr = 0.0;
    double support_error_rate = 0.0;
    bool budget_flag = false;
};

inline TrialStats reduce_trials(const std::vector<double>& mses,
                                const std::vector<char>& support_err,
                                const std::vector<char>& budget) {
    TrialStats st;
    const double n = static_cast<double>(mses.size());
    double sum = 0.0, sumsq = 0.0;
    for (double v : mses) {
        sum += v;
        sumsq += v * v;
    }
    st.mse_mean = sum / n;
    const double var = std::max(sumsq / n - st.mse_mean * st.mse_mean, 0.0);
    st.mse_stderr = std::sqrt(var / n);
    double errs = 0.0;
    for (char c : support_err) errs += c;
    st.support_error_rate = errs / n;
    for (char c : budget) st.budget_flag |= c != 0;
    return st;
}

// Stream ids for derive_seed so every random object has its own lane.
enum : uint64_t {
    kStreamSignal = 1,
    kStreamNoise = 2,
    kStreamComa = 3,
    kStreamSensing = 4,
    kStreamCodebook = 5,
    kStreamTopology = 6,
    kStreamFailures = 7,
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

}  // namespace detail

// Runs one SQuaTS configuration (codebook + decoder) over `trials` seeded
// trials; trial t draws its signal from stream (seed, kStreamSignal, t), so
// different epsilons, decoders and rates see paired signals.
namespace detail {

struct SquatsPointResult {
    TrialStats stats;
    int64_t levels = 0;
    int64_t bits = 0;
    double epsilon = 0.0;
};

inline SquatsPointResult run_squats_point(
    const ExperimentConfig& cfg, double rate, DecoderKind decoder, double eps,
    int rate_index, int eps_index) {
    const bool distributed = cfg.scenario == Scenario::Distributed;
    const int ensemble_len = distributed ? cfg.n * cfg.T : cfg.T;
    const int64_t budget = bits_for_rate(rate, ensemble_len);

    double nominal_rate = rate;
    if (cfg.scenario == Scenario::Noisy)
        nominal_rate = rate / noisy_length_factor(cfg.noise.q, cfg.noise.u);

    int64_t l = level_budget(ensemble_len, cfg.k_design, nominal_rate, eps);
    l = std::min(l, cfg.max_levels);

    Codebook::Params cp;
    cp.bins = static_cast<uint32_t>(ensemble_len);
    cp.levels = static_cast<uint32_t>(l);
    cp.k = static_cast<uint32_t>(cfg.k_design);
    cp.bits = static_cast<uint32_t>(budget);
    cp.seed = derive_seed(cfg.seed, kStreamCodebook, rate_index, eps_index);
    const Codebook cb = Codebook::generate(cp);
    const ScalarQuantizer qz(static_cast<int>(l), cfg.q_lo, cfg.q_hi,
                             cfg.centroid ? Reproduction::GaussianCentroid
                                          : Reproduction::Midpoint);

    std::optional<Topology> topo;
    if (distributed && !cfg.topology.empty()) {
        topo = Topology::load(cfg.topology);
        if (static_cast<int>(topo->graph.encoder_indices().size()) != cfg.n)
            throw ConfigError("topology encoder count does not match n");
    }

    std::vector<double> mses(cfg.trials);
    std::vector<char> serr(cfg.trials), bflag(cfg.trials);

    parallel_for(cfg.trials, cfg.threads, [&](int64_t t) {
        Rng sig_rng(derive_seed(cfg.seed, kStreamSignal, t));
        Rng coma_rng(derive_seed(cfg.seed, kStreamComa, t));

        SparseSignal ensemble;
        Register y(cb.bits());
        if (distributed) {
            const auto signals = gen_joint_sparse(cfg.n, cfg.T, cfg.sparsity, sig_rng);
            ensemble = concat_ensemble(signals);
            const auto regs = encode_distributed(signals, cb, qz);
            if (topo) {
                y = simulate(topo->graph, regs, topo->failures);
            } else {
                for (const auto& r : regs) y |= r;
            }
        } else {
            ensemble = gen_signal(cfg.T, cfg.true_k(), sig_rng);
            y = encode(ensemble, cb, qz);
        }

        MlOptions opt;
        opt.search_budget = cfg.ml_budget;
        if (cfg.scenario == Scenario::Noisy) {
            Rng noise_rng(derive_seed(cfg.seed, kStreamNoise, t));
            y = apply_noise(y, cfg.noise, noise_rng);
            opt.noise = cfg.noise;
        }

        const DecodeResult dr = decoder == DecoderKind::Coma
                                    ? decode_coma(y, cb, qz, coma_rng)
                                    : decode_ml(y, cb, cfg.k_design, qz, opt);
        if (dr.bits_used > budget)
            throw std::logic_error("bit budget exceeded by the codec");

        mses[t] = mse(ensemble.values, dr.signal);
        bool err = false;
        for (int i = 0; i < ensemble.length(); ++i)
            err |= dr.signal[i] != qz.quantize(ensemble.values[i]).value;
        serr[t] = err;
        bflag[t] = dr.budget_exceeded;
    });

    SquatsPointResult out;
    out.stats = reduce_trials(mses, serr, bflag);
    out.levels = l;
    out.bits = budget;
    out.epsilon = eps;
    return out;
}

inline SquatsPointResult run_fragmented_point(
    const ExperimentConfig& cfg, double rate, DecoderKind decoder, double eps,
    int rate_index, int eps_index) {
    const int64_t budget = bits_for_rate(rate, cfg.T);
    const int64_t per_group_bits = budget / cfg.groups;
    if (per_group_bits < 1) throw InfeasibleError("fragmented: budget below 1 bit per group");
    const int group_len = (cfg.T + cfg.groups - 1) / cfg.groups;
    const int k_g = (cfg.k_design + cfg.groups - 1) / cfg.groups;

    int64_t l = level_budget(group_len, k_g, rate, eps);
    l = std::min(l, cfg.max_levels);

    FragmentParams fp;
    fp.groups = cfg.groups;
    fp.design_k = cfg.k_design;
    fp.per_group_levels = static_cast<uint32_t>(l);
    fp.per_group_bits = per_group_bits;
    fp.seed = derive_seed(cfg.seed, kStreamCodebook, rate_index, eps_index);
    fp.decoder = decoder;
    fp.ml.search_budget = cfg.ml_budget;
    const ScalarQuantizer qz(static_cast<int>(l), cfg.q_lo, cfg.q_hi,
                             cfg.centroid ? Reproduction::GaussianCentroid
                                          : Reproduction::Midpoint);

    std::vector<double> mses(cfg.trials);
    std::vector<char> serr(cfg.trials), bflag(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int64_t t) {
        Rng sig_rng(derive_seed(cfg.seed, kStreamSignal, t));
        Rng coma_rng(derive_seed(cfg.seed, kStreamComa, t));
        const SparseSignal s = gen_signal(cfg.T, cfg.true_k(), sig_rng);
        const DecodeResult dr = fragment_pipeline(s, fp, qz, coma_rng);
        if (dr.bits_used > budget)
            throw std::logic_error("bit budget exceeded by the fragmented codec");
        mses[t] = mse(s.values, dr.signal);
        bool err = false;
        for (int i = 0; i < cfg.T; ++i)
            err |= dr.signal[i] != qz.quantize(s.values[i]).value;
        serr[t] = err;
        bflag[t] = dr.budget_exceeded;
    });

    SquatsPointResult out;
    out.stats = reduce_trials(mses, serr, bflag);
    out.levels = l;
    out.bits = per_group_bits * cfg.groups;
    out.epsilon = eps;
    return out;
}

// Direct serial scalar quantization baseline at rate R (needs R >= 1).
inline ResultRow run_direct_point(const ExperimentConfig& cfg, double rate) {
    std::vector<double> mses(cfg.trials);
    std::vector<char> serr(cfg.trials), bflag(cfg.trials, 0);
    parallel_for(cfg.trials, cfg.threads, [&](int64_t t) {
        Rng sig_rng(derive_seed(cfg.seed, kStreamSignal, t));
        const SparseSignal s = gen_signal(cfg.T, cfg.true_k(), sig_rng);
        const auto rec = direct_quantize(s, rate, true);
        mses[t] = mse(s.values, rec);
        serr[t] = 1;  // a dense reconstruction never matches the sparse support
    });
    ResultRow row;
    row.scenario = to_string(cfg.scenario);
    row.rate = rate;
    row.decoder = "direct";
    row.levels = int64_t{1} << static_cast<int>(std::floor(rate));
    row.bits = static_cast<int64_t>(std::floor(rate)) * cfg.T;
    const auto st = reduce_trials(mses, serr, bflag);
    row.mse_mean = st.mse_mean;
    row.mse_stderr = st.mse_stderr;
    row.support_error_rate = st.support_error_rate;
    return row;
}

struct CsPointResult {
    TrialStats stats;
    int m = 0;
    int levels = 0;
    int64_t bits = 0;
};

// One compress-and-quantize evaluation at fixed m. FISTA picks its lambda on
// a held-out trial (index = trials) before the measured runs.
inline CsPointResult run_cs_point(const ExperimentConfig& cfg, double rate, int m,
                                  bool use_fista) {
    const bool distributed = cfg.scenario == Scenario::Distributed;
    const int ensemble_len = distributed ? cfg.n * cfg.T : cfg.T;
    const int64_t budget = bits_for_rate(rate, ensemble_len);

    // block sensing: one matrix per signal for the distributed case
    const int blocks = distributed ? cfg.n : 1;
    const int m_per = std::max(1, m / blocks);
    const int m_total = m_per * blocks;
    if (budget / m_total < 1) {
        CsPointResult bad;
        bad.stats.mse_mean = std::numeric_limits<double>::infinity();
        return bad;
    }
    BlockSensing bs;
    for (int bk = 0; bk < blocks; ++bk) {
        Rng a_rng(derive_seed(cfg.seed, kStreamSensing, m, bk));
        bs.blocks.push_back(gaussian_sensing(m_per, distributed ? cfg.T : ensemble_len, a_rng));
    }
    const Eigen::MatrixXd A = bs.dense();

    auto signal_vector = [&](int64_t t) {
        Rng sig_rng(derive_seed(cfg.seed, kStreamSignal, t));
        SparseSignal ens;
        if (distributed)
            ens = concat_ensemble(gen_joint_sparse(cfg.n, cfg.T, cfg.sparsity, sig_rng));
        else
            ens = gen_signal(cfg.T, cfg.true_k(), sig_rng);
        return ens;
    };

    const int joint_k = distributed ? cfg.sparsity.k : cfg.true_k();

    double lambda = 0.0;
    if (use_fista) {
        // lambda grid scaled by ||A^T y||_inf, evaluated on the held-out trial
        const SparseSignal held = signal_vector(cfg.trials);
        Eigen::VectorXd sv = Eigen::Map<const Eigen::VectorXd>(held.values.data(),
                                                               held.values.size());
        const auto enc = cs_encode(sv, A, budget);
        const double scale = (A.transpose() * enc.y).lpNorm<Eigen::Infinity>();
        double best_mse = std::numeric_limits<double>::infinity();
        for (double g : {0.01, 0.03, 0.1, 0.3}) {
            const Eigen::VectorXd x = fista_recover(enc.y, A, g * scale, 500);
            double acc = 0.0;
            for (int i = 0; i < sv.size(); ++i) acc += (x[i] - sv[i]) * (x[i] - sv[i]);
            acc /= sv.size();
            if (acc < best_mse) {
                best_mse = acc;
                lambda = g * scale;
            }
        }
    }

    std::vector<double> mses(cfg.trials);
    std::vector<char> serr(cfg.trials), bflag(cfg.trials, 0);
    std::vector<int64_t> bits_used(cfg.trials, 0);
    parallel_for(cfg.trials, cfg.threads, [&](int64_t t) {
        const SparseSignal ens = signal_vector(t);
        Eigen::VectorXd sv =
            Eigen::Map<const Eigen::VectorXd>(ens.values.data(), ens.values.size());
        const auto enc = cs_encode(sv, A, budget);
        bits_used[t] = enc.bits_used;
        Eigen::VectorXd x;
        if (use_fista) {
            x = fista_recover(enc.y, A, lambda, 500);
        } else {
            x = qiht_recover(enc, A, joint_k, 300).x;
        }
        double acc = 0.0;
        for (int i = 0; i < sv.size(); ++i) acc += (x[i] - sv[i]) * (x[i] - sv[i]);
        mses[t] = acc / sv.size();

        // support recovered iff the largest-|x| entries sit on the true support
        std::vector<int> idx(sv.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::nth_element(idx.begin(), idx.begin() + joint_k, idx.end(),
                         [&](int a, int b) { return std::abs(x[a]) > std::abs(x[b]); });
        bool ok = true;
        for (int i = 0; i < joint_k; ++i) ok &= ens.values[idx[i]] != 0.0;
        serr[t] = !ok;
    });

    CsPointResult out;
    out.stats = reduce_trials(mses, serr, bflag);
    out.m = m_total;
    out.levels = 1 << std::min<int64_t>(budget / m_total, 16);
    out.bits = *std::max_element(bits_used.begin(), bits_used.end());
    if (out.bits > budget) throw std::logic_error("CS baseline exceeded the bit budget");
    return out;
}

// Sweeps m over {6k, 8k, ..., 20k} and keeps the best-MSE point.
inline ResultRow run_cs_sweep(const ExperimentConfig& cfg, double rate, bool use_fista) {
    const int joint_k =
        cfg.scenario == Scenario::Distributed ? cfg.sparsity.k : cfg.true_k();
    CsPointResult best;
    best.stats.mse_mean = std::numeric_limits<double>::infinity();
    for (int m = 6 * joint_k; m <= 20 * joint_k; m += 2 * joint_k) {
        const CsPointResult r = run_cs_point(cfg, rate, m, use_fista);
        if (r.stats.mse_mean < best.stats.mse_mean) best = r;
    }
    ResultRow row;
    row.scenario = to_string(cfg.scenario);
    row.rate = rate;
    row.decoder = use_fista ? "fista" : "qiht";
    row.levels = best.levels;
    row.bits = best.bits;
    row.mse_mean = best.stats.mse_mean;
    row.mse_stderr = best.stats.mse_stderr;
    row.support_error_rate = best.stats.support_error_rate;
    return row;
}

}  // namespace detail

inline ResultTable run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultTable table;
    const std::vector<double> eps_grid = epsilon_grid(cfg.eps_policy, cfg.eps_fixed);

    std::vector<int> true_ks{cfg.true_k()};
    if (cfg.scenario == Scenario::Mismatch) true_ks = cfg.mismatch_true_k;

    for (int tk : true_ks) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.k_true = tk;
        for (size_t ri = 0; ri < cfg.rates.size(); ++ri) {
            const double rate = cfg.rates[ri];
            for (DecoderKind dec : cfg.decoders) {
                detail::Timer timer;
                detail::SquatsPointResult best;
                best.stats.mse_mean = std::numeric_limits<double>::infinity();
                for (size_t ei = 0; ei < eps_grid.size(); ++ei) {
                    const auto r =
                        cfg.scenario == Scenario::Fragmented
                            ? detail::run_fragmented_point(point_cfg, rate, dec, eps_grid[ei],
                                                           static_cast<int>(ri),
                                                           static_cast<int>(ei))
                            : detail::run_squats_point(point_cfg, rate, dec, eps_grid[ei],
                                                       static_cast<int>(ri),
                                                       static_cast<int>(ei));
                    if (r.stats.mse_mean < best.stats.mse_mean) best = r;
                }
                ResultRow row;
                row.scenario = to_string(cfg.scenario);
                row.rate = rate;
                row.decoder = dec == DecoderKind::Ml ? "ml" : "coma";
                if (cfg.scenario == Scenario::Mismatch)
                    row.decoder += "#k" + std::to_string(tk);
                if (best.stats.budget_flag) row.decoder += "!budget";
                row.epsilon = best.epsilon;
                row.levels = best.levels;
                row.bits = best.bits;
                row.mse_mean = best.stats.mse_mean;
                row.mse_stderr = best.stats.mse_stderr;
                row.support_error_rate = best.stats.support_error_rate;
                row.wall_ms = cfg.timing ? timer.ms() : 0.0;
                table.rows.push_back(row);
            }
        }
    }

    for (size_t ri = 0; ri < cfg.rates.size(); ++ri) {
        const double rate = cfg.rates[ri];
        if (cfg.baseline_direct && cfg.scenario != Scenario::Distributed && rate >= 1.0) {
            detail::Timer timer;
            ResultRow row = detail::run_direct_point(cfg, rate);
            row.wall_ms = cfg.timing ? timer.ms() : 0.0;
            table.rows.push_back(row);
        }
        if (cfg.baseline_qiht) {
            detail::Timer timer;
            ResultRow row = detail::run_cs_sweep(cfg, rate, false);
            row.wall_ms = cfg.timing ? timer.ms() : 0.0;
            table.rows.push_back(row);
        }
        if (cfg.baseline_fista) {
            detail::Timer timer;
            ResultRow row = detail::run_cs_sweep(cfg, rate, true);
            row.wall_ms = cfg.timing ? timer.ms() : 0.0;
            table.rows.push_back(row);
        }
    }
    return table;
}

// ---- emission -------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void emit_csv(const ResultTable& table, std::ostream& os) {
    os << "scenario,R,decoder,epsilon,l,b,mse_mean,mse_stderr,support_error_rate,wall_ms\n";
    for (const ResultRow& r : table.rows) {
        os << r.scenario << ',' << format_double(r.rate) << ',' << r.decoder << ','
           << format_double(r.epsilon) << ',' << r.levels << ',' << r.bits << ','
           << format_double(r.mse_mean) << ',' << format_double(r.mse_stderr) << ','
           << format_double(r.support_error_rate) << ',' << format_double(r.wall_ms)
           << '\n';
    }
    if (!os) throw std::runtime_error("emit_csv: write failed");
}

inline ResultTable parse_csv(std::istream& is) {
    ResultTable table;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("parse_csv: empty input");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 10) throw ConfigError("parse_csv: bad row: " + line);
        ResultRow r;
        r.scenario = cells[0];
        r.rate = std::stod(cells[1]);
        r.decoder = cells[2];
        r.epsilon = std::stod(cells[3]);
        r.levels = std::stoll(cells[4]);
        r.bits = std::stoll(cells[5]);
        r.mse_mean = std::stod(cells[6]);
        r.mse_stderr = std::stod(cells[7]);
        r.support_error_rate = std::stod(cells[8]);
        r.wall_ms = std::stod(cells[9]);
        table.rows.push_back(r);
    }
    return table;
}

// Minimal line chart: MSE on a log axis against the quantization rate, one
// polyline per (scenario, decoder) series.
inline void emit_svg(const ResultTable& table, std::ostream& os) {
    const int W = 820, H = 520, ML = 70, MR = 160, MT = 30, MB = 50;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::vector<std::pair<std::string, std::vector<const ResultRow*>>> series;
    for (const ResultRow& r : table.rows) {
        const std::string key = r.scenario + "/" + r.decoder;
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const auto& s) { return s.first == key; });
        if (it == series.end()) {
            series.push_back({key, {}});
            it = series.end() - 1;
        }
        it->second.push_back(&r);
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const ResultRow& r : table.rows) {
        const double y = std::max(r.mse_mean, 1e-12);
        xmin = std::min(xmin, r.rate);
        xmax = std::max(xmax, r.rate);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (table.rows.empty()) {
        xmin = 0; xmax = 1; ymin = 1e-6; ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    double ly0 = std::floor(std::log10(ymin));
    double ly1 = std::ceil(std::log10(ymax));
    if (ly1 == ly0) ly1 = ly0 + 1;

    auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double y) {
        const double ly = std::log10(std::max(y, 1e-12));
        return H - MB - (ly - ly0) / (ly1 - ly0) * (H - MT - MB);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
       << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
       << H - MB << "\" stroke=\"black\"/>\n";

    for (double d = ly0; d <= ly1 + 1e-9; d += 1.0) {
        const double y = Y(std::pow(10.0, d));
        os << "<line x1=\"" << ML - 4 << "\" y1=\"" << y << "\" x2=\"" << ML
           << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ML - 8 << "\" y=\"" << y + 4
           << "\" font-size=\"11\" text-anchor=\"end\">1e" << static_cast<int>(d)
           << "</text>\n";
    }
    const int xticks = 5;
    for (int i = 0; i <= xticks; ++i) {
        const double xv = xmin + (xmax - xmin) * i / xticks;
        const double x = X(xv);
        char label[32];
        std::snprintf(label, sizeof(label), "%.3g", xv);
        os << "<line x1=\"" << x << "\" y1=\"" << H - MB << "\" x2=\"" << x << "\" y2=\""
           << H - MB + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << H - MB + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    os << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
       << "\" font-size=\"12\" text-anchor=\"middle\">quantization rate R</text>\n";
    os << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
       << "\" font-size=\"12\" transform=\"rotate(-90 16 " << (MT + H - MB) / 2
       << ")\" text-anchor=\"middle\">MSE</text>\n";

    int ci = 0;
    for (auto& [name, rows] : series) {
        std::sort(rows.begin(), rows.end(),
                  [](const ResultRow* a, const ResultRow* b) { return a->rate < b->rate; });
        const char* color = palette[ci % 8];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const ResultRow* r : rows)
            os << X(r->rate) << ',' << Y(std::max(r->mse_mean, 1e-12)) << ' ';
        os << "\"/>\n";
        for (const ResultRow* r : rows) {
            os << "<circle cx=\"" << X(r->rate) << "\" cy=\""
               << Y(std::max(r->mse_mean, 1e-12)) << "\" r=\"2.5\" fill=\"" << color
               << "\"/>\n";
        }
        os << "<text x=\"" << W - MR + 10 << "\" y=\"" << MT + 16 * ci + 10
           << "\" font-size=\"11\" fill=\"" << color << "\">" << name << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    if (!os) throw std::runtime_error("emit_svg: write failed");
}

}  // namespace squats

#endif
