#pragma once

#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace carnot {

enum class ErrorKind {
  Structural,   // mismatched algebras, bad shapes
  Validation,   // algebra or extension fails its axioms
  NotLiftable,  // defect probe above tolerance
  Domain,       // bad numeric argument (lambda <= 0, beta outside (0,1], ...)
  ChartExit,    // evaluation outside a sampled chart
  Input,        // malformed file / unparsable data
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error structural_error(const std::string& m) { return Error(ErrorKind::Structural, m); }
inline Error validation_error(const std::string& m) { return Error(ErrorKind::Validation, m); }
inline Error domain_error(const std::string& m) { return Error(ErrorKind::Domain, m); }
inline Error chart_exit_error(const std::string& m) { return Error(ErrorKind::ChartExit, m); }
inline Error input_error(const std::string& m) { return Error(ErrorKind::Input, m); }
inline Error not_liftable_error(const std::string& m) { return Error(ErrorKind::NotLiftable, m); }

// Deterministic RNG. std::uniform_real_distribution is not pinned across
// standard libraries, so draws are derived from raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t x = s_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    s_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  // in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
  }

 private:
  std::uint64_t s_;
};

// Worker count for the OpenMP kernels; 0 = runtime default.
void set_jobs(int jobs);
int get_jobs();

// Parallel loop over independent work items. Each item writes only its own
// output slot, so results are identical to the serial loop bit-for-bit and
// independent of the thread count. Reductions happen serially afterwards.
// The first exception thrown by any item is re-raised after the loop.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
  if (get_jobs() != 1) {
    std::exception_ptr first;
#pragma omp parallel for schedule(static) num_threads(get_jobs() > 0 ? get_jobs() : omp_get_max_threads())
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(carnot_parallel_for_err)
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

template <class F>
void serial_for(std::int64_t n, F&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace carnot
