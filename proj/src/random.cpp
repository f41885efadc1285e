#include "tfsense/random.hpp"

namespace tfs {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(mix64(mix64(seed ^ 0x6A09E667F3BCC909ull) + mix64(stream_id + kGolden))) {}

RandomStream::result_type RandomStream::operator()() {
  ++counter_;
  // Two rounds so that neighbouring keys do not give shifted copies of
  // the same sequence.
  return mix64(mix64(key_ + counter_ * kGolden) ^ key_);
}

double RandomStream::normal() { return gauss_(*this); }

double RandomStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(*this);
}

double RandomStream::sign() { return ((*this)() >> 63) ? 1.0 : -1.0; }

RandomStream RandomStream::substream(std::uint64_t child_id) const {
  return RandomStream(mix64(key_ ^ 0x3C6EF372FE94F82Bull), child_id);
}

}  // namespace tfs
