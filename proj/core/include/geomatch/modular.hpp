#pragma once

#include <cstdint>

#include "geomatch/errors.hpp"

namespace geomatch {

bool is_prime_u64(std::uint64_t n);

// Arithmetic in Z_p for an odd prime p < 2^62.  Elements are canonical
// residues in [0, p).  Multiplication runs through Montgomery form
// internally; results are always canonical.
class PrimeField {
  public:
    explicit PrimeField(std::uint64_t p);

    std::uint64_t p() const { return p_; }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + p_ - b;
    }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }

    // Multiplier pre-conversion: ready(a) = a * R mod p; then
    // mul_ready(ready(a), b) = a * b with a single Montgomery step.
    std::uint64_t ready(std::uint64_t a) const { return mont_mul(a, r2_); }
    std::uint64_t mul_ready(std::uint64_t am, std::uint64_t b) const {
        return mont_mul(am, b);
    }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return mont_mul(ready(a), b);
    }

    std::uint64_t pow(std::uint64_t base, std::uint64_t e) const;
    std::uint64_t inv(std::uint64_t a) const;

    std::uint64_t reduce(unsigned __int128 x) const {
        return static_cast<std::uint64_t>(x % p_);
    }

  private:
    std::uint64_t mont_mul(std::uint64_t a, std::uint64_t b) const {
        const unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
        const std::uint64_t m = static_cast<std::uint64_t>(t) * ninv_;
        const unsigned __int128 u = t + static_cast<unsigned __int128>(m) * p_;
        std::uint64_t r = static_cast<std::uint64_t>(u >> 64);
        return r >= p_ ? r - p_ : r;
    }

    std::uint64_t p_ = 0;
    std::uint64_t ninv_ = 0;  // -p^{-1} mod 2^64
    std::uint64_t r2_ = 0;    // 2^128 mod p
};

struct FieldParams {
    std::uint64_t p = 0;
};

// Smallest prime >= max(n^4, 2^31).  The bound keeps the failure probability
// of the randomized rank identities at most n^2 / p.
FieldParams gen_prime(std::uint64_t n);

}  // namespace geomatch
