#pragma once
// Closed-form reference values for the acceptance suite. Plain loops over
// std::vector only; nothing here calls the library's numerical code.

#include <cstddef>
#include <vector>

namespace selfaffine::oracle {

using Dense = std::vector<std::vector<double>>;

// Growth rates of e_1^T A_{w_1} ... A_{w_n} for monomial matrices driven by
// a Markov chain on letters. The pair (last letter, current row) is itself
// a Markov chain; each closed class carries one almost-sure rate.
struct MonomialRates {
  // Ascending, one per closed class reachable from the start.
  std::vector<double> rates;
  // Probability of being absorbed in each class.
  std::vector<double> weights;
};
MonomialRates monomial_rates(const std::vector<Dense>& linear, const Dense& transition,
                             const std::vector<double>& initial);

// Equal diagonal maps: count copies of diag(entries).
struct DiagonalFamily {
  std::size_t count = 0;
  std::vector<double> entries;
};

// Root of log count + log phi^s(diag) = 0.
double diagonal_dimension(const DiagonalFamily& f);

// Product of all pairs (a_i (+) b_j), projected by (x, y) -> x + y; the
// depth-n difference quotient log S_n - log S_{n-1} at s.
double sum_projection_drop(const DiagonalFamily& a, const DiagonalFamily& b, double s,
                           unsigned n);

// Pressure of the product at s with no projection (it is exact at any depth).
double direct_sum_pressure(const DiagonalFamily& a, const DiagonalFamily& b, double s);

// log(sigma_{k-1} / sigma_k) of a diagonal matrix.
double diagonal_gap(const std::vector<double>& entries, std::size_t k);

}  // namespace selfaffine::oracle
