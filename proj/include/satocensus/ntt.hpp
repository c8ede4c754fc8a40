#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace satocensus::ntt {

inline constexpr std::uint32_t kMod = 998244353;
inline constexpr std::uint32_t kRoot = 3;
inline constexpr std::size_t kMaxLen = std::size_t{1} << 23;

inline std::uint32_t pw(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  b %= kMod;
  while (e) {
    if (e & 1) r = r * b % kMod;
    b = b * b % kMod;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

inline void transform(std::vector<std::uint32_t>& a, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::uint32_t> roots(n / 2 + 1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::uint32_t w = pw(kRoot, (kMod - 1) / len);
    if (invert) w = pw(w, kMod - 2);
    const std::size_t half = len / 2;
    roots[0] = 1;
    for (std::size_t k = 1; k < half; ++k)
      roots[k] = static_cast<std::uint32_t>(std::uint64_t{roots[k - 1]} * w % kMod);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::uint32_t u = a[i + k];
        std::uint32_t v = static_cast<std::uint32_t>(std::uint64_t{a[i + k + half]} * roots[k] % kMod);
        std::uint32_t s = u + v;
        a[i + k] = s >= kMod ? s - kMod : s;
        a[i + k + half] = u >= v ? u - v : u + kMod - v;
      }
    }
  }
  if (invert) {
    std::uint64_t inv_n = pw(n, kMod - 2);
    for (auto& x : a) x = static_cast<std::uint32_t>(x * inv_n % kMod);
  }
}

inline std::uint32_t encode(std::int64_t v) {
  std::int64_t r = v % static_cast<std::int64_t>(kMod);
  if (r < 0) r += kMod;
  return static_cast<std::uint32_t>(r);
}

/// Residue back to the signed integer in (-kMod/2, kMod/2].
inline std::int64_t decode(std::uint32_t v) {
  return v > kMod / 2 ? static_cast<std::int64_t>(v) - kMod : static_cast<std::int64_t>(v);
}

/// Linear convolution of small signed integer sequences. Exact as long as
/// every true coefficient lies strictly inside (-kMod/2, kMod/2).
inline std::vector<std::int64_t> convolve(const std::vector<std::int64_t>& x,
                                          const std::vector<std::int64_t>& y) {
  if (x.empty() || y.empty()) return {};
  const std::size_t need = x.size() + y.size() - 1;
  std::size_t n = 1;
  while (n < need) n <<= 1;
  if (n > kMaxLen) throw std::length_error("ntt: transform length too large");
  std::vector<std::uint32_t> a(n, 0), b(n, 0);
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = encode(x[i]);
  for (std::size_t i = 0; i < y.size(); ++i) b[i] = encode(y[i]);
  transform(a, false);
  transform(b, false);
  for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<std::uint32_t>(std::uint64_t{a[i]} * b[i] % kMod);
  transform(a, true);
  std::vector<std::int64_t> out(need);
  for (std::size_t i = 0; i < need; ++i) out[i] = decode(a[i]);
  return out;
}

}  // namespace satocensus::ntt
