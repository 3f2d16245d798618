#include "geomatch/modular.hpp"

namespace geomatch {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (const std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                                  19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Deterministic witness set for all 64-bit inputs.
    for (const std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                                  19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
    if ((p & 1) == 0 || p >= (1ULL << 62))
        throw Error("field modulus must be an odd prime below 2^62");
    // Newton iteration for p^{-1} mod 2^64.
    std::uint64_t inv = p;
    for (int i = 0; i < 5; ++i) inv *= 2 - p * inv;
    ninv_ = ~inv + 1;
    // r2_ = (2^64 mod p)^2 mod p
    const std::uint64_t r64 = (~std::uint64_t{0} % p + 1) % p;
    r2_ = mulmod(r64, r64, p);
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t e) const {
    std::uint64_t r = 1;
    std::uint64_t b = base % p_;
    while (e) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

std::uint64_t PrimeField::inv(std::uint64_t a) const {
    if (a == 0) throw Singular("inverse of zero");
    return pow(a, p_ - 2);
}

FieldParams gen_prime(std::uint64_t n) {
    if (n >= (1ULL << 15)) throw TooLarge("instance too large for the n^4 field bound");
    std::uint64_t lo = 1ULL << 31;
    const std::uint64_t n4 = n * n * n * n;
    if (n4 > lo) lo = n4;
    std::uint64_t c = lo | 1;
    if (c < lo) c += 2;
    while (!is_prime_u64(c)) c += 2;
    return FieldParams{c};
}

}  // namespace geomatch
