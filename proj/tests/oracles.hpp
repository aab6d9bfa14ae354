#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bibd/sstensor.hpp"

namespace oracle {

// Plain v^k loop over the dense array.
inline std::vector<double> dense_apply(const bibd::DenseTensor& t, const std::vector<double>& x) {
  const int v = t.dim, k = t.order;
  std::vector<double> y(v, 0.0);
  std::vector<int> idx(k, 0);
  for (std::size_t pos = 0; pos < t.data.size(); ++pos) {
    std::size_t rest = pos;
    for (int j = k - 1; j >= 0; --j) {
      idx[j] = static_cast<int>(rest % v);
      rest /= v;
    }
    double term = t.data[pos];
    for (int j = 1; j < k; ++j) term *= x[idx[j]];
    y[idx[0]] += term;
  }
  return y;
}

inline double dense_form(const bibd::DenseTensor& t, const std::vector<double>& x) {
  const auto y = dense_apply(t, x);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// Every non-decreasing k-tuple over [0, v).
inline std::vector<bibd::IndexKey> all_keys(int k, int v) {
  std::vector<bibd::IndexKey> out;
  bibd::IndexKey cur(k, 0);
  while (true) {
    out.push_back(cur);
    int j = k - 1;
    while (j >= 0 && cur[j] == v - 1) --j;
    if (j < 0) break;
    ++cur[j];
    for (int t = j + 1; t < k; ++t) cur[t] = cur[j];
  }
  return out;
}

// Random sparse strongly symmetric tensor: each multiset kept with probability `density`.
inline bibd::SymTensor random_tensor(int k, int v, std::mt19937_64& rng, double density = 0.6) {
  std::uniform_real_distribution<double> val(-2.0, 2.0), coin(0.0, 1.0);
  bibd::SymTensor t(k, v);
  for (const auto& key : all_keys(k, v))
    if (coin(rng) < density) t.set(key, val(rng));
  return t;
}

inline std::vector<double> random_vector(int v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> x(v);
  for (auto& xi : x) xi = val(rng);
  return x;
}

inline std::vector<double> ones(int v) { return std::vector<double>(v, 1.0); }

}  // namespace oracle
