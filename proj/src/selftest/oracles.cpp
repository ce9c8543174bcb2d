#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace selfaffine::oracle {

namespace {

std::size_t nonzero_column(const std::vector<double>& row) {
  for (std::size_t c = 0; c < row.size(); ++c)
    if (row[c] != 0.0) return c;
  throw std::invalid_argument("monomial oracle: zero row");
}

// Solves nu (T - I) = 0 with sum nu = 1 on the states in `members`.
std::vector<double> stationary(const Dense& t, const std::vector<std::size_t>& members) {
  const std::size_t m = members.size();
  Dense a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      a[i][j] = t[members[j]][members[i]] - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < m; ++j) a[m - 1][j] = 1.0;
  a[m - 1][m] = 1.0;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> nu(m);
  for (std::size_t i = 0; i < m; ++i) nu[i] = a[i][m] / a[i][i];
  return nu;
}

double log_phi(std::vector<double> sigma, double s) {
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  double out = 0.0;
  std::size_t j = 0;
  for (; j < sigma.size() && static_cast<double>(j + 1) <= s; ++j) out += std::log(sigma[j]);
  const double frac = s - static_cast<double>(j);
  if (frac > 0.0 && j < sigma.size()) out += frac * std::log(sigma[j]);
  return out;
}

std::vector<double> magnitudes(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::fabs(x));
  return out;
}

}  // namespace

MonomialRates monomial_rates(const std::vector<Dense>& linear, const Dense& transition,
                             const std::vector<double>& initial) {
  const std::size_t letters = linear.size();
  const std::size_t d = linear.front().size();
  const std::size_t states = letters * d;
  Dense t(states, std::vector<double>(states, 0.0));
  std::vector<double> reward(states, 0.0);
  for (std::size_t l = 0; l < letters; ++l)
    for (std::size_t r = 0; r < d; ++r) {
      const std::size_t from = l * d + r;
      for (std::size_t m = 0; m < letters; ++m) {
        const double p = transition[l][m];
        if (p == 0.0) continue;
        const std::size_t c = nonzero_column(linear[m][r]);
        t[from][m * d + c] += p;
        reward[from] += p * std::log(std::fabs(linear[m][r][c]));
      }
    }

  std::vector<std::vector<bool>> reach(states, std::vector<bool>(states, false));
  for (std::size_t i = 0; i < states; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < states; ++j)
      if (t[i][j] > 0.0) reach[i][j] = true;
  }
  for (std::size_t k = 0; k < states; ++k)
    for (std::size_t i = 0; i < states; ++i)
      for (std::size_t j = 0; j < states; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;

  std::vector<double> dist(states, 0.0);
  for (std::size_t l = 0; l < letters; ++l)
    dist[l * d + nonzero_column(linear[l][0])] += initial[l];
  for (int step = 0; step < 5000; ++step) {
    std::vector<double> next(states, 0.0);
    for (std::size_t i = 0; i < states; ++i)
      for (std::size_t j = 0; j < states; ++j) next[j] += dist[i] * t[i][j];
    dist = std::move(next);
  }

  std::vector<bool> seen(states, false);
  std::vector<std::pair<double, double>> classes;
  for (std::size_t i = 0; i < states; ++i) {
    if (seen[i]) continue;
    bool closed = true;
    for (std::size_t j = 0; j < states; ++j)
      if (reach[i][j] && !reach[j][i]) closed = false;
    if (!closed) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < states; ++j)
      if (reach[i][j]) {
        members.push_back(j);
        seen[j] = true;
      }
    double mass = 0.0;
    for (std::size_t j : members) mass += dist[j];
    if (mass < 1e-12) continue;
    const auto nu = stationary(t, members);
    double rate = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) rate += nu[k] * reward[members[k]];
    classes.emplace_back(rate, mass);
  }
  std::sort(classes.begin(), classes.end());
  MonomialRates out;
  for (const auto& [rate, mass] : classes) {
    out.rates.push_back(rate);
    out.weights.push_back(mass);
  }
  return out;
}

double diagonal_dimension(const DiagonalFamily& f) {
  const auto sigma = magnitudes(f.entries);
  const double log_n = std::log(static_cast<double>(f.count));
  auto g = [&](double s) { return log_n + log_phi(sigma, s); };
  const double top = static_cast<double>(sigma.size());
  if (g(top) >= 0.0) return top;
  double lo = 0.0, hi = top;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sum_projection_drop(const DiagonalFamily& a, const DiagonalFamily& b, double s,
                           unsigned n) {
  const auto x = magnitudes(a.entries);
  const auto y = magnitudes(b.entries);
  const double log_n = std::log(static_cast<double>(a.count * b.count));
  auto log_sum = [&](unsigned depth) {
    // Log singular values of [D_a^depth  D_b^depth]: one per row.
    std::vector<double> logs;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double big = std::max(x[j], y[j]), small = std::min(x[j], y[j]);
      logs.push_back(depth * std::log(big) + 0.5 * std::log1p(std::pow(small / big, 2.0 * depth)));
    }
    std::sort(logs.begin(), logs.end(), std::greater<>());
    double phi = 0.0;
    std::size_t j = 0;
    for (; j < logs.size() && static_cast<double>(j + 1) <= s; ++j) phi += logs[j];
    if (s > static_cast<double>(j) && j < logs.size()) phi += (s - static_cast<double>(j)) * logs[j];
    return depth * log_n + phi;
  };
  return log_sum(n) - log_sum(n - 1);
}

double direct_sum_pressure(const DiagonalFamily& a, const DiagonalFamily& b, double s) {
  auto sigma = magnitudes(a.entries);
  const auto y = magnitudes(b.entries);
  sigma.insert(sigma.end(), y.begin(), y.end());
  return std::log(static_cast<double>(a.count * b.count)) + log_phi(sigma, s);
}

double diagonal_gap(const std::vector<double>& entries, std::size_t k) {
  auto sigma = magnitudes(entries);
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return std::log(sigma[k - 2] / sigma[k - 1]);
}

}  // namespace selfaffine::oracle
