#include "occtime/rng.hpp"

#include <cmath>
#include <numbers>

namespace occtime {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept
{
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

// 53 random bits mapped to the midpoint grid of (0,1); never 0 or 1.
inline double to_open_unit(std::uint64_t bits) noexcept
{
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept
{
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, ctr[0], lo0, hi0);
    mulhilo(kMul1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id)
{
}

std::array<std::uint64_t, 2> RngStream::next_block() noexcept
{
  const Philox4x32::Counter ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  ++block_;
  const auto out = Philox4x32::generate(ctr, key);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

std::pair<double, double> RngStream::uniform_pair() noexcept
{
  const auto bits = next_block();
  return {to_open_unit(bits[0]), to_open_unit(bits[1])};
}

double RngStream::uniform() noexcept
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto [u, v] = uniform_pair();
  spare_ = v;
  has_spare_ = true;
  return u;
}

double RngStream::exponential() noexcept { return -std::log(uniform()); }

std::pair<double, double> RngStream::normal_pair() noexcept
{
  const auto [u, v] = uniform_pair();
  const double radius = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace occtime
