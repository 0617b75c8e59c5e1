#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace amlm {

// Error hierarchy. The C API maps these onto status codes; everything else
// lets them propagate.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Deterministic RNG with portable draw helpers. std::mt19937_64 gives a
// fixed bit stream for a fixed seed; the helpers below avoid the
// implementation-defined std distributions so results only depend on the
// engine stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), unbiased via rejection.
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent stream seed from (base, tag). splitmix64 finalizer.
  static uint64_t derive(uint64_t base, uint64_t tag) {
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace amlm
