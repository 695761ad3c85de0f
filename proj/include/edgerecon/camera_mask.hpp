#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "edgerecon/error.hpp"

namespace edgerecon {

inline constexpr int kMaxCameras = 32;

/// Binary selection vector over N cameras. Camera `i` (0-based) is bit `i`.
///
/// The textual form is a bitstring whose i-th character is camera i, so
/// "11000" selects the first two cameras. Ordering compares bitstrings
/// lexicographically, which is the canonical action order.
class CameraMask {
public:
  constexpr CameraMask() = default;
  constexpr CameraMask(std::uint32_t bits, int n_cameras) : bits_(bits), n_(n_cameras) {}

  static CameraMask none(int n) { return {0u, n}; }
  static CameraMask all(int n) {
    return {n >= 32 ? ~0u : ((1u << n) - 1u), n};
  }

  static CameraMask from_string(std::string_view s) {
    if (s.empty() || s.size() > static_cast<std::size_t>(kMaxCameras))
      throw ConfigError("mask", "bitstring length must be in [1, 32]: '" + std::string(s) + "'");
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        bits |= 1u << i;
      else if (s[i] != '0')
        throw ConfigError("mask", "bitstring must contain only 0/1: '" + std::string(s) + "'");
    }
    return {bits, static_cast<int>(s.size())};
  }

  constexpr std::uint32_t bits() const noexcept { return bits_; }
  constexpr int size() const noexcept { return n_; }
  constexpr int count() const noexcept { return std::popcount(bits_); }
  constexpr bool test(int camera) const noexcept { return (bits_ >> camera) & 1u; }

  CameraMask with(int camera) const { return {bits_ | (1u << camera), n_}; }
  CameraMask operator&(const CameraMask& o) const { return {bits_ & o.bits_, n_}; }
  CameraMask operator|(const CameraMask& o) const { return {bits_ | o.bits_, n_}; }

  constexpr bool subset_of(const CameraMask& o) const noexcept {
    return (bits_ & ~o.bits_) == 0;
  }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i)
      if (test(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  friend constexpr bool operator==(const CameraMask&, const CameraMask&) = default;

  friend std::strong_ordering operator<=>(const CameraMask& a, const CameraMask& b) {
    if (a.n_ != b.n_) return a.n_ <=> b.n_;
    // Lexicographic on the bitstring: the lowest differing camera decides.
    const std::uint32_t diff = a.bits_ ^ b.bits_;
    if (diff == 0) return std::strong_ordering::equal;
    const int first = std::countr_zero(diff);
    return a.test(first) ? std::strong_ordering::greater : std::strong_ordering::less;
  }

private:
  std::uint32_t bits_ = 0;
  int n_ = 0;
};

}  // namespace edgerecon

template <>
struct std::hash<edgerecon::CameraMask> {
  std::size_t operator()(const edgerecon::CameraMask& m) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(m.size()) << 32) | m.bits());
  }
};
