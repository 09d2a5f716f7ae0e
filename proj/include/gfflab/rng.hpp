#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace gfflab {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `stream` derived from `master`. Pure function of both
/// arguments, so replica k always sees the same random numbers regardless of
/// which thread runs it or in which order replicas are scheduled.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

Engine make_engine(std::uint64_t master, std::uint64_t stream);

/// Worker count from GFFLAB_THREADS, else hardware concurrency (at least 1).
unsigned thread_count();

namespace detail {
void run_parallel(std::size_t n, void (*thunk)(void*, std::size_t), void* ctx);
}

/// Calls fn(i) for i in [0, n) on thread_count() workers.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  auto thunk = [](void* ctx, std::size_t i) { (*static_cast<Fn*>(ctx))(i); };
  detail::run_parallel(n, thunk, &fn);
}

/// Calls fn(k, engine_k) for every replica k with its own deterministic stream.
template <class Fn>
void for_each_replica(std::size_t n, std::uint64_t master, Fn&& fn) {
  parallel_for(n, [&](std::size_t k) {
    Engine rng = make_engine(master, k);
    fn(k, rng);
  });
}

inline double standard_normal(Engine& rng) {
  std::normal_distribution<double> dist;
  return dist(rng);
}

inline double uniform01(Engine& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_exponential(Engine& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

}  // namespace gfflab
