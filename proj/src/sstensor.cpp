#include "bibd/sstensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bibd {

namespace {

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

void check_shape(const SymTensor& t, std::size_t len) {
  if (len != static_cast<std::size_t>(t.dim())) {
    throw TensorError(TensorError::Kind::ShapeMismatch,
                      "vector length " + std::to_string(len) + " does not match dimension " + std::to_string(t.dim()));
  }
}

// Run-length view of a sorted key: (index, multiplicity) pairs.
std::vector<std::pair<int, int>> runs(const IndexKey& key) {
  std::vector<std::pair<int, int>> out;
  for (int idx : key) {
    if (!out.empty() && out.back().first == idx)
      ++out.back().second;
    else
      out.emplace_back(idx, 1);
  }
  return out;
}

}  // namespace

int support_size(const IndexKey& key) { return static_cast<int>(runs(key).size()); }

double multinomial(std::span<const int> counts) {
  int total = 0;
  double denom = 1.0;
  for (int c : counts) {
    total += c;
    denom *= factorial(c);
  }
  return factorial(total) / denom;
}

SymTensor::SymTensor(int order, int dim) : order_(order), dim_(dim) {
  if (order < 1 || dim < 1) {
    throw TensorError(TensorError::Kind::ShapeMismatch,
                      "order and dimension must be positive, got " + std::to_string(order) + ", " + std::to_string(dim));
  }
}

IndexKey SymTensor::canonical(IndexKey index) const {
  if (static_cast<int>(index.size()) != order_) {
    throw TensorError(TensorError::Kind::BadIndex, "index has " + std::to_string(index.size()) +
                                                       " entries, tensor order is " + std::to_string(order_));
  }
  for (int i : index) {
    if (i < 0 || i >= dim_) {
      throw TensorError(TensorError::Kind::BadIndex, "index " + std::to_string(i) + " outside [0, " +
                                                         std::to_string(dim_) + ")");
    }
  }
  std::sort(index.begin(), index.end());
  return index;
}

double SymTensor::at(IndexKey index) const {
  const auto it = entries_.find(canonical(std::move(index)));
  return it == entries_.end() ? 0.0 : it->second;
}

void SymTensor::set(IndexKey index, double value) {
  auto key = canonical(std::move(index));
  if (value == 0.0)
    entries_.erase(key);
  else
    entries_[std::move(key)] = value;
}

void SymTensor::add(IndexKey index, double value) {
  auto key = canonical(std::move(index));
  auto [it, inserted] = entries_.try_emplace(std::move(key), value);
  if (!inserted) it->second += value;
  if (it->second == 0.0) entries_.erase(it);
}

SymTensor identity_tensor(int k, int v) {
  SymTensor t(k, v);
  for (int i = 0; i < v; ++i) t.set(IndexKey(k, i), 1.0);
  return t;
}

SymTensor subdiagonal_identity(int k, int v) {
  SymTensor t(k, v);
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      for (int a = 1; a < k; ++a) {
        IndexKey key(k, j);
        std::fill_n(key.begin(), a, i);
        t.set(std::move(key), 1.0);
      }
    }
  }
  return t;
}

SymTensor adjacency_tensor(int v, int k, const std::vector<Block>& blocks) {
  SymTensor t(k, v);
  const double weight = 1.0 / factorial(k - 1);
  for (const auto& block : blocks) t.set(block, weight);
  return t;
}

SymTensor degree_tensor(int v, int k, const std::vector<Block>& blocks) {
  SymTensor t(k, v);
  const auto deg = point_degrees(v, blocks);
  for (int i = 0; i < v; ++i) t.set(IndexKey(k, i), deg[i]);
  return t;
}

SymTensor codegree_tensor(int v, int k, const std::vector<Block>& blocks) {
  SymTensor t(k, v);
  const auto co = pair_codegrees(v, blocks);
  const double norm = std::ldexp(1.0, k - 1) - 1.0;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      const int d = co[i * v + j];
      if (d == 0) continue;
      for (int a = 1; a < k; ++a) {
        IndexKey key(k, j);
        std::fill_n(key.begin(), a, i);
        t.set(std::move(key), d / norm);
      }
    }
  }
  return t;
}

SymTensor adjacency_tensor(const Design& d) { return adjacency_tensor(d.v(), d.k(), d.blocks()); }
SymTensor degree_tensor(const Design& d) { return degree_tensor(d.v(), d.k(), d.blocks()); }
SymTensor codegree_tensor(const Design& d) { return codegree_tensor(d.v(), d.k(), d.blocks()); }

namespace {

SymTensor characterization(const Design& d, double adjacency_sign) {
  const int k = d.k(), v = d.v();
  const std::array<double, 3> coeffs = {2.0 * d.r() * (k - 1), 1.0, adjacency_sign * (k - 1)};
  const std::array<SymTensor, 3> parts = {identity_tensor(k, v), codegree_tensor(d), adjacency_tensor(d)};
  return linear_combine(coeffs, parts, k, v);
}

}  // namespace

SymTensor characterization_tensor(const Design& d) { return characterization(d, -1.0); }
SymTensor signless_characterization_tensor(const Design& d) { return characterization(d, +1.0); }

std::pair<SymTensor, SymTensor> laplacian_tensors(int v, int k, const std::vector<Block>& blocks) {
  const std::array<SymTensor, 2> parts = {degree_tensor(v, k, blocks), adjacency_tensor(v, k, blocks)};
  const std::array<double, 2> minus = {1.0, -1.0}, plus = {1.0, 1.0};
  return {linear_combine(minus, parts, k, v), linear_combine(plus, parts, k, v)};
}

std::pair<SymTensor, SymTensor> laplacian_tensors(const Design& d) {
  return laplacian_tensors(d.v(), d.k(), d.blocks());
}

SymTensor abs_tensor(const SymTensor& t) {
  SymTensor out(t.order(), t.dim());
  for (const auto& [key, value] : t.entries()) out.set(key, std::abs(value));
  return out;
}

SymTensor scaled(const SymTensor& t, double factor) {
  SymTensor out(t.order(), t.dim());
  for (const auto& [key, value] : t.entries()) out.set(key, factor * value);
  return out;
}

SymTensor linear_combine(std::span<const double> coeffs, std::span<const SymTensor> tensors, int order, int dim) {
  if (coeffs.size() != tensors.size()) {
    throw TensorError(TensorError::Kind::ShapeMismatch, "coefficient and tensor counts differ");
  }
  SymTensor out(order, dim);
  for (std::size_t n = 0; n < tensors.size(); ++n) {
    const auto& t = tensors[n];
    if (t.order() != order || t.dim() != dim) {
      throw TensorError(TensorError::Kind::ShapeMismatch,
                        "tensor " + std::to_string(n) + " has shape (" + std::to_string(t.order()) + "," +
                            std::to_string(t.dim()) + "), expected (" + std::to_string(order) + "," +
                            std::to_string(dim) + ")");
    }
    for (const auto& [key, value] : t.entries()) out.add(key, coeffs[n] * value);
  }
  return out;
}

std::vector<double> apply_tensor(const SymTensor& t, std::span<const double> x) {
  check_shape(t, x.size());
  std::vector<double> y(x.size(), 0.0);
  std::vector<int> counts;
  for (const auto& [key, value] : t.entries()) {
    const auto r = runs(key);
    counts.resize(r.size());
    for (std::size_t a = 0; a < r.size(); ++a) {
      // Remove one copy of r[a].first; the rest of the multiset is the tail.
      double prod = 1.0;
      for (std::size_t c = 0; c < r.size(); ++c) {
        counts[c] = r[c].second - (c == a ? 1 : 0);
        for (int e = 0; e < counts[c]; ++e) prod *= x[r[c].first];
      }
      y[r[a].first] += value * multinomial(counts) * prod;
    }
  }
  return y;
}

double form(const SymTensor& t, std::span<const double> x) {
  check_shape(t, x.size());
  double total = 0.0;
  std::vector<int> counts;
  for (const auto& [key, value] : t.entries()) {
    const auto r = runs(key);
    counts.clear();
    double prod = 1.0;
    for (const auto& [idx, mult] : r) {
      counts.push_back(mult);
      for (int e = 0; e < mult; ++e) prod *= x[idx];
    }
    total += value * multinomial(counts) * prod;
  }
  return total;
}

double DenseTensor::operator()(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int i : index) flat = flat * dim + i;
  return data[flat];
}

DenseTensor densify(const SymTensor& t, std::size_t cap) {
  const double size = std::pow(static_cast<double>(t.dim()), t.order());
  if (size > static_cast<double>(cap)) {
    throw TensorError(TensorError::Kind::TooLarge, "dense size v^k = " + std::to_string(size) + " exceeds cap " +
                                                       std::to_string(cap));
  }
  DenseTensor out{t.order(), t.dim(), std::vector<double>(static_cast<std::size_t>(size), 0.0)};
  for (const auto& [key, value] : t.entries()) {
    IndexKey perm = key;
    do {
      std::size_t flat = 0;
      for (int i : perm) flat = flat * t.dim() + i;
      out.data[flat] = value;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

std::string dump_tensor(const SymTensor& t) {
  std::string out = std::to_string(t.order()) + ' ' + std::to_string(t.dim()) + ' ' + std::to_string(t.nnz()) + '\n';
  char buf[32];
  for (const auto& [key, value] : t.entries()) {
    for (int i : key) out += std::to_string(i) + ' ';
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out += buf;
    out += '\n';
  }
  return out;
}

SymTensor parse_tensor_dump(std::string_view text) {
  std::istringstream in{std::string(text)};
  int k = 0, v = 0;
  std::size_t nnz = 0;
  if (!(in >> k >> v >> nnz)) throw TensorError(TensorError::Kind::Parse, "missing 'k v nnz' header");
  SymTensor t(k, v);
  for (std::size_t n = 0; n < nnz; ++n) {
    IndexKey key(k);
    double value = 0.0;
    for (auto& i : key)
      if (!(in >> i)) throw TensorError(TensorError::Kind::Parse, "truncated entry " + std::to_string(n));
    if (!(in >> value)) throw TensorError(TensorError::Kind::Parse, "missing value for entry " + std::to_string(n));
    if (!std::is_sorted(key.begin(), key.end())) {
      throw TensorError(TensorError::Kind::Parse, "entry " + std::to_string(n) + " key is not non-decreasing");
    }
    t.set(std::move(key), value);
  }
  return t;
}

}  // namespace bibd
