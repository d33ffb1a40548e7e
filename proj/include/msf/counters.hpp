#pragma once

#include <atomic>
#include <cstdint>

namespace msf {

struct CounterSnapshot {
  std::uint64_t hash_evaluations = 0;
  std::uint64_t cells_read = 0;
  std::uint64_t lookups = 0;

  friend CounterSnapshot operator-(const CounterSnapshot& a, const CounterSnapshot& b) noexcept {
    return {a.hash_evaluations - b.hash_evaluations, a.cells_read - b.cells_read, a.lookups - b.lookups};
  }
  friend bool operator==(const CounterSnapshot&, const CounterSnapshot&) = default;
};

/// Instrumentation for the cost model. Updates are relaxed atomic adds, so
/// concurrent readers of one filter never lose increments. Monotone until
/// reset() is called.
class HashCounter {
 public:
  HashCounter() = default;
  HashCounter(const HashCounter& other) noexcept { store(other.snapshot()); }
  HashCounter& operator=(const HashCounter& other) noexcept {
    store(other.snapshot());
    return *this;
  }

  void add(const CounterSnapshot& delta) noexcept {
    hash_evaluations_.fetch_add(delta.hash_evaluations, std::memory_order_relaxed);
    cells_read_.fetch_add(delta.cells_read, std::memory_order_relaxed);
    lookups_.fetch_add(delta.lookups, std::memory_order_relaxed);
  }

  CounterSnapshot snapshot() const noexcept {
    return {hash_evaluations_.load(std::memory_order_relaxed), cells_read_.load(std::memory_order_relaxed),
            lookups_.load(std::memory_order_relaxed)};
  }

  std::uint64_t hash_evaluations() const noexcept { return hash_evaluations_.load(std::memory_order_relaxed); }
  std::uint64_t cells_read() const noexcept { return cells_read_.load(std::memory_order_relaxed); }
  std::uint64_t lookups() const noexcept { return lookups_.load(std::memory_order_relaxed); }

  void reset() noexcept { store({}); }

 private:
  void store(const CounterSnapshot& v) noexcept {
    hash_evaluations_.store(v.hash_evaluations, std::memory_order_relaxed);
    cells_read_.store(v.cells_read, std::memory_order_relaxed);
    lookups_.store(v.lookups, std::memory_order_relaxed);
  }

  std::atomic<std::uint64_t> hash_evaluations_{0};
  std::atomic<std::uint64_t> cells_read_{0};
  std::atomic<std::uint64_t> lookups_{0};
};

}  // namespace msf
