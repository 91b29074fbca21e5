#ifndef FACTEQ_COMMON_HPP
#define FACTEQ_COMMON_HPP

#include <gmpxx.h>

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace facteq {

using Nat = std::uint64_t;
using BigInt = mpz_class;

// Default cap on the bit size of any expanded big integer (2^24 bits).
inline constexpr Nat kDefaultBitCap = Nat{1} << 24;

// Exceeding a configured cap or budget. Bad arguments are reported as
// std::invalid_argument; everything else is a logic error.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Runs fn(i) for lo <= i < hi on up to `workers` threads. fn must write only
// per-i state; callers merge results in index order, so the outcome does not
// depend on the worker count. The first exception thrown by fn is rethrown
// on the calling thread.
template <class Fn>
void parallel_for(Nat lo, Nat hi, unsigned workers, Fn&& fn) {
  if (lo >= hi) return;
  if (workers <= 1 || hi - lo == 1) {
    for (Nat i = lo; i < hi; ++i) fn(i);
    return;
  }
  std::atomic<Nat> next{lo};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto run = [&] {
    for (;;) {
      Nat i = next.fetch_add(1);
      if (i >= hi || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  unsigned spawned = static_cast<unsigned>(std::min<Nat>(workers, hi - lo));
  std::vector<std::thread> pool;
  pool.reserve(spawned);
  for (unsigned t = 0; t < spawned; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace facteq

#endif  // FACTEQ_COMMON_HPP
