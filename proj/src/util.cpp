#include "shoesplat/util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "shoesplat/error.hpp"

namespace shoesplat {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::MalformedText: return "MalformedText";
    case ErrorKind::MalformedPose: return "MalformedPose";
    case ErrorKind::MalformedTrack: return "MalformedTrack";
    case ErrorKind::InvalidCamera: return "InvalidCamera";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::EmptyPointCloud: return "EmptyPointCloud";
    case ErrorKind::EmptyEvalSet: return "EmptyEvalSet";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::TooFewFrames: return "TooFewFrames";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::InconsistentReconstruction: return "InconsistentReconstruction";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      fail(ErrorKind::MissingFile, "missing file: " + path.string());
    }
    fail(ErrorKind::IoError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorKind::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::IoError, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(resolve_thread_count(threads), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (size_t i = next++; i < n && !failed; i = next++) fn(i);
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace shoesplat
