#ifndef SQUATS_CODEBOOK_HPP
#define SQUATS_CODEBOOK_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "squats/bitvec.hpp"
#include "squats/errors.hpp"
#include "squats/rng.hpp"

namespace squats {

// Binned binary codebook: `bins` bins of `levels` codewords of `bits` bits,
// each bit i.i.d. Bernoulli(ln2 / k), plus the implicit shared all-zero word.
// Rows are stored bin-major then index-major, drawn from a single seeded
// stream, so a (bins, levels, k, bits, seed) tuple is bit-reproducible.
class Codebook {
public:
    struct Params {
        uint32_t bins = 0;    // T (or n*T for an ensemble)
        uint32_t levels = 0;  // l
        uint32_t k = 1;       // design sparsity, sets the bit probability
        uint32_t bits = 0;    // b
        uint64_t seed = 0;
        bool reject_duplicates = false;
    };

    static Codebook generate(const Params& p) {
        if (p.bins < 1 || p.levels < 1 || p.k < 1 || p.bits < 1)
            throw std::invalid_argument("Codebook::generate: all dimensions must be >= 1");
        Codebook cb;
        cb.p_ = p;
        cb.stride_ = (p.bits + 63) / 64;
        const uint64_t rows = static_cast<uint64_t>(p.bins) * p.levels;
        cb.words_.assign(rows * cb.stride_, 0);

        if (p.reject_duplicates) check_repetition_feasible(p);

        const double prob = M_LN2 / p.k;
        Rng rng(p.seed);
        std::unordered_set<std::string> seen;
        uint64_t draws = 0;
        const uint64_t draw_cap = 100ull * rows;
        for (uint64_t r = 0; r < rows; ++r) {
            for (;;) {
                if (p.reject_duplicates && draws >= draw_cap)
                    throw InfeasibleError(
                        "Codebook::generate: duplicate-free generation exceeded retry cap");
                ++draws;
                uint64_t* row = cb.words_.data() + r * cb.stride_;
                std::memset(row, 0, cb.stride_ * sizeof(uint64_t));
                for (uint32_t bit = 0; bit < p.bits; ++bit)
                    if (rng.bernoulli(prob)) row[bit >> 6] |= uint64_t{1} << (bit & 63);
                if (!p.reject_duplicates) break;
                bool nonzero = false;
                for (uint32_t w = 0; w < cb.stride_; ++w) nonzero |= row[w] != 0;
                if (!nonzero) continue;  // would collide with the shared zero word
                std::string key(reinterpret_cast<const char*>(row),
                                cb.stride_ * sizeof(uint64_t));
                if (seen.insert(std::move(key)).second) break;
            }
        }
        return cb;
    }

    uint32_t bins() const { return p_.bins; }
    uint32_t levels() const { return p_.levels; }
    uint32_t sparsity() const { return p_.k; }
    uint32_t bits() const { return p_.bits; }
    uint64_t seed() const { return p_.seed; }
    const Params& params() const { return p_; }
    uint32_t words_per_codeword() const { return stride_; }
    uint64_t row_count() const { return static_cast<uint64_t>(p_.bins) * p_.levels; }
    double bit_prob() const { return M_LN2 / p_.k; }

    // Row index for codeword j (1..levels) of bin i (0..bins-1).
    uint64_t row_index(uint32_t level_j, uint32_t bin_i) const {
        return static_cast<uint64_t>(bin_i) * p_.levels + (level_j - 1);
    }

    std::span<const uint64_t> row(uint64_t r) const {
        return {words_.data() + r * stride_, stride_};
    }

    std::span<const uint64_t> codeword(uint32_t level_j, uint32_t bin_i) const {
        return row(row_index(level_j, bin_i));
    }

    double ones_fraction() const {
        uint64_t ones = 0;
        for (uint64_t r = 0; r < row_count(); ++r) {
            auto w = row(r);
            for (uint64_t v : w) ones += std::popcount(v);
        }
        return static_cast<double>(ones) /
               (static_cast<double>(row_count()) * p_.bits);
    }

    bool operator==(const Codebook& other) const {
        return p_.bins == other.p_.bins && p_.levels == other.p_.levels &&
               p_.k == other.p_.k && p_.bits == other.p_.bits &&
               p_.seed == other.p_.seed && words_ == other.words_;
    }

    // Binary layout: magic "SQTS", version u16, T u32, l u32, k u32, b u32,
    // seed u64 (all little endian), then bins*levels codewords row-major,
    // ceil(b/8) bytes each, bit i of a codeword in byte i/8 position i%8.
    void serialize(std::ostream& os) const {
        os.write("SQTS", 4);
        write_le(os, static_cast<uint16_t>(kFormatVersion));
        write_le(os, p_.bins);
        write_le(os, p_.levels);
        write_le(os, p_.k);
        write_le(os, p_.bits);
        write_le(os, p_.seed);
        const size_t row_bytes = (p_.bits + 7) / 8;
        std::vector<uint8_t> buf(row_bytes);
        for (uint64_t r = 0; r < row_count(); ++r) {
            const uint64_t* w = words_.data() + r * stride_;
            for (size_t i = 0; i < row_bytes; ++i)
                buf[i] = static_cast<uint8_t>(w[i >> 3] >> ((i & 7) * 8));
            os.write(reinterpret_cast<const char*>(buf.data()), row_bytes);
        }
        if (!os) throw std::runtime_error("Codebook::serialize: write failed");
    }

    static Codebook deserialize(std::istream& is) {
        char magic[4];
        is.read(magic, 4);
        if (!is || std::memcmp(magic, "SQTS", 4) != 0)
            throw ConfigError("Codebook: bad magic, not a codebook file");
        const uint16_t version = read_le<uint16_t>(is);
        if (version != kFormatVersion)
            throw ConfigError("Codebook: unsupported format version " + std::to_string(version));
        Codebook cb;
        cb.p_.bins = read_le<uint32_t>(is);
        cb.p_.levels = read_le<uint32_t>(is);
        cb.p_.k = read_le<uint32_t>(is);
        cb.p_.bits = read_le<uint32_t>(is);
        cb.p_.seed = read_le<uint64_t>(is);
        if (cb.p_.bins < 1 || cb.p_.levels < 1 || cb.p_.k < 1 || cb.p_.bits < 1)
            throw ConfigError("Codebook: corrupt header");
        cb.stride_ = (cb.p_.bits + 63) / 64;
        cb.words_.assign(cb.row_count() * cb.stride_, 0);
        const size_t row_bytes = (cb.p_.bits + 7) / 8;
        std::vector<uint8_t> buf(row_bytes);
        for (uint64_t r = 0; r < cb.row_count(); ++r) {
            is.read(reinterpret_cast<char*>(buf.data()), row_bytes);
            if (!is) throw ConfigError("Codebook: truncated file");
            uint64_t* w = cb.words_.data() + r * cb.stride_;
            for (size_t i = 0; i < row_bytes; ++i)
                w[i >> 3] |= uint64_t{buf[i]} << ((i & 7) * 8);
        }
        return cb;
    }

    nlohmann::json metadata() const {
        return {{"magic", "SQTS"}, {"version", kFormatVersion}, {"T", p_.bins},
                {"l", p_.levels},  {"k", p_.k},                 {"b", p_.bits},
                {"seed", p_.seed}};
    }

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("Codebook::save: cannot open " + path);
        serialize(os);
        std::ofstream meta(path + ".json");
        if (!meta) throw std::runtime_error("Codebook::save: cannot open " + path + ".json");
        meta << metadata().dump(2) << "\n";
    }

    static Codebook load(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw ConfigError("Codebook::load: cannot open " + path);
        return deserialize(is);
    }

private:
    static constexpr uint16_t kFormatVersion = 1;

    // Enough distinct typical codewords must exist: l*T <= (b / w)^w with
    // w = (ln2/k) b the mean codeword weight.
    static void check_repetition_feasible(const Params& p) {
        const double w = M_LN2 / p.k * p.bits;
        const double lhs = std::log(static_cast<double>(p.bins) * p.levels);
        if (w <= 0.0 || w >= p.bits || lhs > w * std::log(p.bits / w))
            throw InfeasibleError(
                "Codebook::generate: not enough distinct codewords at this length; "
                "increase b (see the repetition feasibility bound)");
    }

    template <typename T>
    static void write_le(std::ostream& os, T v) {
        uint8_t buf[sizeof(T)];
        for (size_t i = 0; i < sizeof(T); ++i)
            buf[i] = static_cast<uint8_t>(static_cast<uint64_t>(v) >> (8 * i));
        os.write(reinterpret_cast<const char*>(buf), sizeof(T));
    }

    template <typename T>
    static T read_le(std::istream& is) {
        uint8_t buf[sizeof(T)];
        is.read(reinterpret_cast<char*>(buf), sizeof(T));
        uint64_t v = 0;
        for (size_t i = 0; i < sizeof(T); ++i) v |= uint64_t{buf[i]} << (8 * i);
        return static_cast<T>(v);
    }

    Params p_;
    uint32_t stride_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace squats

#endif
