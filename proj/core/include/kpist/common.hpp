#ifndef KPIST_COMMON_HPP
#define KPIST_COMMON_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpist {

using Complex = std::complex<double>;

// Thrown on malformed configuration or inconsistent inputs (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown when an iterative solver fails to reach its tolerance (CLI exit code 3).
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown on unreadable or truncated data files (CLI exit code 2).
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Fixed-order pairwise reduction. All norm and inner-product style sums in the
// library go through these so results do not depend on the thread count.
double pairwise_sum(std::span<const double> v);
Complex pairwise_sum(std::span<const Complex> v);

// Static-partition parallel map over [0, n). Each index is processed by exactly
// one thread and all per-index work uses fixed-order reductions, so the output
// is identical for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

void set_num_threads(int n);
int num_threads();

} // namespace kpist

#endif
