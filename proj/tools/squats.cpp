// Command-line front end: codebook generation, single-shot encode/decode,
// Monte Carlo sweeps and network simulation.
//
// Exit codes: 0 ok, 2 config error, 3 infeasible parameters, 4 search budget
// exceeded.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "squats/bench.hpp"
#include "squats/channel.hpp"
#include "squats/codec.hpp"
#include "squats/network.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw squats::ConfigError("cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw squats::ConfigError(path + ": " + e.what());
    }
    return j;
}

int resolve_threads(int cli_threads) {
    if (const char* env = std::getenv("SQUATS_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
        }
        throw squats::ConfigError("SQUATS_THREADS must be a positive integer");
    }
    return cli_threads;
}

std::vector<double> signal_from_json(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.contains("values")) return j.at("values").get<std::vector<double>>();
    throw squats::ConfigError("signal file must be an array or {\"values\": [...]}");
}

squats::ScalarQuantizer quantizer_from_spec(const json& q, int fallback_levels) {
    const int l = q.value("l", fallback_levels);
    const double lo = q.value("lo", -2.0);
    const double hi = q.value("hi", 2.0);
    const bool centroid = q.value("centroid", false);
    return squats::ScalarQuantizer(l, lo, hi,
                                   centroid ? squats::Reproduction::GaussianCentroid
                                            : squats::Reproduction::Midpoint);
}

void write_register(const std::string& path, const squats::Register& reg) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    const auto bytes = reg.to_bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write failed: " + path);
}

squats::Register read_register(const std::string& path, size_t bits) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw squats::ConfigError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                               std::istreambuf_iterator<char>());
    return squats::Register::from_bytes(bytes, bits);
}

int cmd_gen_codebook(const std::string& config, const std::string& out_dir,
                     uint64_t seed_override, bool has_seed) {
    const json j = load_json(config);
    squats::Codebook::Params p;
    try {
        p.bins = j.at("T").get<uint32_t>();
        p.levels = j.at("l").get<uint32_t>();
        p.k = j.at("k").get<uint32_t>();
        if (j.contains("b")) {
            p.bits = j.at("b").get<uint32_t>();
        } else if (j.contains("R")) {
            p.bits = static_cast<uint32_t>(
                squats::bits_for_rate(j.at("R").get<double>(), p.bins));
        } else {
            throw squats::ConfigError("codebook config needs b or R");
        }
        p.seed = j.value("seed", uint64_t{0});
        p.reject_duplicates = j.value("reject_duplicates", false);
    } catch (const json::exception& e) {
        throw squats::ConfigError(std::string("bad codebook config: ") + e.what());
    }
    if (has_seed) p.seed = seed_override;
    const squats::Codebook cb = squats::Codebook::generate(p);
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "codebook.sqts").string();
    cb.save(path);
    std::cout << "wrote " << path << " (" << cb.row_count() << " codewords of "
              << cb.bits() << " bits)\n";
    return kExitOk;
}

int cmd_encode(const std::string& codebook, const std::string& signal_path,
               const std::string& quantizer_spec, const std::string& out) {
    const squats::Codebook cb = squats::Codebook::load(codebook);
    squats::SparseSignal s;
    s.values = signal_from_json(load_json(signal_path));
    s.support_budget = static_cast<int>(cb.sparsity());
    json qspec = quantizer_spec.empty() ? json::object() : json::parse(quantizer_spec);
    const auto qz = quantizer_from_spec(qspec, static_cast<int>(cb.levels()));
    const squats::Register reg = squats::encode(s, cb, qz);
    write_register(out, reg);
    std::cout << "wrote " << out << " (" << reg.size() << " bits, " << reg.count()
              << " ones)\n";
    return kExitOk;
}

int cmd_decode(const std::string& codebook, const std::string& register_path,
               const std::string& decoder, int k, const std::string& noise_spec,
               const std::string& quantizer_spec, const std::string& out,
               uint64_t seed) {
    const squats::Codebook cb = squats::Codebook::load(codebook);
    const squats::Register reg = read_register(register_path, cb.bits());
    json qspec = quantizer_spec.empty() ? json::object() : json::parse(quantizer_spec);
    const auto qz = quantizer_from_spec(qspec, static_cast<int>(cb.levels()));
    if (k < 0) k = static_cast<int>(cb.sparsity());

    squats::DecodeResult result;
    if (decoder == "coma") {
        squats::Rng rng(seed);
        result = squats::decode_coma(reg, cb, qz, rng);
    } else if (decoder == "ml") {
        squats::MlOptions opt;
        if (!noise_spec.empty()) {
            const json nj = json::parse(noise_spec);
            squats::NoiseModel nm{nj.value("q", 0.0), nj.value("u", 0.0)};
            nm.validate();
            opt.noise = nm;
        }
        result = squats::decode_ml(reg, cb, k, qz, opt);
    } else {
        throw squats::ConfigError("decoder must be ml or coma");
    }

    json rj;
    rj["signal"] = result.signal;
    rj["support"] = json::array();
    for (const auto& p : result.support)
        rj["support"].push_back({{"bin", p.bin}, {"level", p.level}});
    rj["exact_match"] = result.exact_match;
    rj["used_noisy_fallback"] = result.used_noisy_fallback;
    rj["budget_exceeded"] = result.budget_exceeded;
    rj["candidates_examined"] = result.candidates_examined;
    if (std::isfinite(result.log_likelihood)) rj["log_likelihood"] = result.log_likelihood;
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << rj.dump(2) << "\n";
    std::cout << "wrote " << out << "\n";
    return result.budget_exceeded ? kExitBudget : kExitOk;
}

int cmd_bench(const std::string& config, const std::string& out_dir,
              uint64_t seed_override, bool has_seed, int threads,
              const std::string& format) {
    json j = load_json(config);
    squats::ExperimentConfig cfg = squats::ExperimentConfig::from_json(j);
    if (has_seed) cfg.seed = seed_override;
    cfg.threads = resolve_threads(threads);
    const squats::ResultTable table = squats::run_sweep(cfg);
    fs::create_directories(out_dir);
    if (format == "csv") {
        const std::string path = (fs::path(out_dir) / "results.csv").string();
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path);
        squats::emit_csv(table, os);
        std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
    } else if (format == "svg") {
        const std::string path = (fs::path(out_dir) / "results.svg").string();
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path);
        squats::emit_svg(table, os);
        std::cout << "wrote " << path << "\n";
    } else {
        throw squats::ConfigError("format must be csv or svg");
    }
    return kExitOk;
}

int cmd_net_sim(const std::string& topology_path, const std::string& config,
                const std::string& out_dir, uint64_t seed_override, bool has_seed) {
    const squats::Topology topo = squats::Topology::load(topology_path);
    const json j = load_json(config);
    int n, T, k, l;
    int64_t b;
    uint64_t seed;
    try {
        n = j.at("n").get<int>();
        T = j.at("T").get<int>();
        k = j.at("k").get<int>();
        l = j.at("l").get<int>();
        b = j.at("b").get<int64_t>();
        seed = j.value("seed", uint64_t{1});
    } catch (const json::exception& e) {
        throw squats::ConfigError(std::string("bad net-sim config: ") + e.what());
    }
    if (has_seed) seed = seed_override;
    if (static_cast<int>(topo.graph.encoder_indices().size()) != n)
        throw squats::ConfigError("topology encoder count does not match n");

    squats::Codebook::Params cp;
    cp.bins = static_cast<uint32_t>(n) * static_cast<uint32_t>(T);
    cp.levels = static_cast<uint32_t>(l);
    cp.k = static_cast<uint32_t>(k);
    cp.bits = static_cast<uint32_t>(b);
    cp.seed = squats::derive_seed(seed, 5);
    const squats::Codebook cb = squats::Codebook::generate(cp);
    const squats::ScalarQuantizer qz(l);

    squats::Rng rng(squats::derive_seed(seed, 1));
    const auto signals =
        squats::gen_joint_sparse(n, T, squats::JointSparsityModel::overall(k), rng);
    const auto regs = squats::encode_distributed(signals, cb, qz);
    const squats::Register y = squats::simulate(topo.graph, regs, topo.failures);
    const auto reach = squats::reachability(topo.graph, topo.failures);
    const auto result = squats::decode_ml(y, cb, k, qz);

    const auto truth = squats::concat_ensemble(signals);
    json rj;
    rj["reachable"] = json::array();
    for (bool r : reach) rj["reachable"].push_back(r);
    rj["register_ones"] = y.count();
    rj["register_bits"] = y.size();
    rj["mse"] = squats::mse(truth.values, result.signal);
    rj["recovered"] = result.signal;
    rj["exact_match"] = result.exact_match;

    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "net_sim.json").string();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << rj.dump(2) << "\n";
    write_register((fs::path(out_dir) / "decoder_register.bin").string(), y);
    std::cout << "wrote " << path << "\n";
    return result.budget_exceeded ? kExitBudget : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SQuaTS: group-testing based serial quantization of sparse sequences"};
    app.require_subcommand(1);

    std::string config, out_dir = ".", format = "csv";
    std::string codebook, signal_path, register_path, quantizer_spec, noise_spec;
    std::string decoder = "ml", topology, out_file;
    uint64_t seed = 0;
    bool has_seed = false;
    int threads = 1, k = -1;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the RNG seed")
            ->each([&](const std::string&) { has_seed = true; });
    };

    auto* gen = app.add_subcommand("gen-codebook", "generate and store a codebook");
    gen->add_option("--config", config, "codebook JSON config")->required();
    gen->add_option("--out", out_dir, "output directory");
    add_seed(gen);

    auto* enc = app.add_subcommand("encode", "encode a signal file into a register");
    enc->add_option("--codebook", codebook, "codebook file")->required();
    enc->add_option("--signal", signal_path, "signal JSON file")->required();
    enc->add_option("--quantizer", quantizer_spec, "inline quantizer JSON");
    enc->add_option("--out", out_file, "register output file")->required();

    auto* dec = app.add_subcommand("decode", "decode a register file");
    dec->add_option("--codebook", codebook, "codebook file")->required();
    dec->add_option("--register", register_path, "register input file")->required();
    dec->add_option("--decoder", decoder, "ml or coma");
    dec->add_option("--k", k, "decoder sparsity (defaults to the codebook's k)");
    dec->add_option("--noise", noise_spec, "noisy-ML JSON, e.g. {\"q\":0.1,\"u\":0.1}");
    dec->add_option("--quantizer", quantizer_spec, "inline quantizer JSON");
    dec->add_option("--out", out_file, "recovered-signal JSON output")->required();
    add_seed(dec);

    auto* bench = app.add_subcommand("bench", "run a Monte Carlo sweep");
    bench->add_option("--config", config, "experiment JSON config")->required();
    bench->add_option("--out", out_dir, "output directory");
    bench->add_option("--threads", threads, "worker threads (SQUATS_THREADS overrides)");
    bench->add_option("--format", format, "csv or svg");
    add_seed(bench);

    auto* net = app.add_subcommand("net-sim", "simulate a multi-hop OR network");
    net->add_option("--topology", topology, "topology JSON file")->required();
    net->add_option("--config", config, "net-sim JSON config")->required();
    net->add_option("--out", out_dir, "output directory");
    add_seed(net);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_codebook(config, out_dir, seed, has_seed);
        if (enc->parsed()) return cmd_encode(codebook, signal_path, quantizer_spec, out_file);
        if (dec->parsed())
            return cmd_decode(codebook, register_path, decoder, k, noise_spec,
                              quantizer_spec, out_file, seed);
        if (bench->parsed())
            return cmd_bench(config, out_dir, seed, has_seed, threads, format);
        if (net->parsed()) return cmd_net_sim(topology, config, out_dir, seed, has_seed);
    } catch (const squats::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const squats::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
