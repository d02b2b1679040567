#ifndef SQUATS_BITVEC_HPP
#define SQUATS_BITVEC_HPP

#include <bit>
#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace squats {

// Dense bit vector used for registers and codebook rows. Bit i lives in word
// i/64 at position i%64; unused high bits of the last word are kept zero.
class BitVec {
public:
    BitVec() = default;

    explicit BitVec(size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    size_t size() const { return nbits_; }
    size_t word_count() const { return words_.size(); }
    uint64_t* data() { return words_.data(); }
    const uint64_t* data() const { return words_.data(); }
    std::span<const uint64_t> words() const { return {words_.data(), words_.size()}; }

    void set(size_t i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }
    void reset(size_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void clear() { words_.assign(words_.size(), 0); }

    bool any() const {
        for (uint64_t w : words_)
            if (w) return true;
        return false;
    }

    size_t count() const {
        size_t c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    BitVec& operator|=(const BitVec& other) {
        if (other.nbits_ != nbits_)
            throw std::invalid_argument("BitVec: size mismatch in OR");
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    void or_words(std::span<const uint64_t> w) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= w[i];
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.nbits_ == b.nbits_ && a.words_ == b.words_;
    }

    // Serialized as ceil(nbits/8) bytes; bit i goes to byte i/8, position i%8.
    std::vector<uint8_t> to_bytes() const {
        std::vector<uint8_t> out((nbits_ + 7) / 8, 0);
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<uint8_t>(words_[i >> 3] >> ((i & 7) * 8));
        return out;
    }

    static BitVec from_bytes(std::span<const uint8_t> bytes, size_t nbits) {
        if (bytes.size() != (nbits + 7) / 8)
            throw std::invalid_argument("BitVec::from_bytes: byte count does not match bit length");
        BitVec v(nbits);
        for (size_t i = 0; i < bytes.size(); ++i)
            v.words_[i >> 3] |= uint64_t{bytes[i]} << ((i & 7) * 8);
        v.mask_tail();
        return v;
    }

    std::string to_string() const {
        std::string s(nbits_, '0');
        for (size_t i = 0; i < nbits_; ++i)
            if (test(i)) s[i] = '1';
        return s;
    }

private:
    void mask_tail() {
        const size_t rem = nbits_ & 63;
        if (rem && !words_.empty()) words_.back() &= (uint64_t{1} << rem) - 1;
    }

    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

// True when cw OR reg == reg, i.e. the codeword has no 1 where reg has 0.
inline bool covers(const BitVec& reg, std::span<const uint64_t> cw) {
    const uint64_t* r = reg.data();
    for (size_t i = 0; i < cw.size(); ++i)
        if (cw[i] & ~r[i]) return false;
    return true;
}

inline size_t count_and(std::span<const uint64_t> a, std::span<const uint64_t> b) {
    size_t c = 0;
    for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
    return c;
}

inline size_t count_andnot(std::span<const uint64_t> a, std::span<const uint64_t> b) {
    size_t c = 0;
    for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & ~b[i]);
    return c;
}

}  // namespace squats

#endif
