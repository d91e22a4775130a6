#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <string_view>

namespace shoesplat {

/// Deterministic random source. Only the raw 64-bit engine output is used so
/// sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

  template <typename Container>
  void shuffle(Container& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and renames it into place so readers never
/// observe a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view bytes);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Callers must make each task write only its own outputs.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

int resolve_thread_count(int requested);

}  // namespace shoesplat
