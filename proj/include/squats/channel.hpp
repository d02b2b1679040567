#ifndef SQUATS_CHANNEL_HPP
#define SQUATS_CHANNEL_HPP

#include "squats/codec.hpp"
#include "squats/rng.hpp"

namespace squats {

// Applies the asymmetric bit-flip model once, bit by bit in index order, so a
// fixed rng stream yields a fixed corrupted register.
inline Register apply_noise(const Register& reg, const NoiseModel& noise, Rng& rng) {
    noise.validate();
    Register out(reg.size());
    for (size_t i = 0; i < reg.size(); ++i) {
        if (reg.test(i)) {
            if (!rng.bernoulli(noise.u)) out.set(i);
        } else {
            if (rng.bernoulli(noise.q)) out.set(i);
        }
    }
    return out;
}

}  // namespace squats

#endif
