#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bibd/design.hpp"

namespace bibd {

class TensorError : public std::runtime_error {
 public:
  enum class Kind { ShapeMismatch, BadIndex, TooLarge, Parse };

  TensorError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Canonical (non-decreasing) index multiset of a tensor entry.
using IndexKey = std::vector<int>;

/// Number of distinct indices in a canonical key: 1 for diagonal, 2 for sub-diagonal entries.
int support_size(const IndexKey& key);

/// Number of ordered index tuples that are permutations of the multiset with the
/// given multiplicities: (sum c)! / prod(c!).
double multinomial(std::span<const int> counts);

/// Strongly symmetric tensor of order k and dimension v.
///
/// Entries depend only on the multiset of their indices, so exactly one value is
/// stored per multiset. Keys are sorted lexicographically; zeros are never stored.
class SymTensor {
 public:
  using Entries = std::map<IndexKey, double>;

  SymTensor(int order, int dim);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  const Entries& entries() const { return entries_; }

  /// Value at any index tuple; the tuple need not be sorted.
  double at(IndexKey index) const;

  /// Overwrites the entry for the multiset of `index`. Storing 0 erases it.
  void set(IndexKey index, double value);
  /// Adds to the entry for the multiset of `index`, erasing it on exact cancellation.
  void add(IndexKey index, double value);

  friend bool operator==(const SymTensor&, const SymTensor&) = default;

 private:
  IndexKey canonical(IndexKey index) const;

  int order_;
  int dim_;
  Entries entries_;
};

SymTensor identity_tensor(int k, int v);
SymTensor subdiagonal_identity(int k, int v);

/// Hypergraph tensors for an arbitrary k-uniform block family on v points.
SymTensor adjacency_tensor(int v, int k, const std::vector<Block>& blocks);
SymTensor degree_tensor(int v, int k, const std::vector<Block>& blocks);
SymTensor codegree_tensor(int v, int k, const std::vector<Block>& blocks);

SymTensor adjacency_tensor(const Design& d);
SymTensor degree_tensor(const Design& d);
SymTensor codegree_tensor(const Design& d);

/// P = 2r(k-1) I + C - (k-1) A.
SymTensor characterization_tensor(const Design& d);
/// Q = 2r(k-1) I + C + (k-1) A.
SymTensor signless_characterization_tensor(const Design& d);

/// (D - A, D + A).
std::pair<SymTensor, SymTensor> laplacian_tensors(int v, int k, const std::vector<Block>& blocks);
std::pair<SymTensor, SymTensor> laplacian_tensors(const Design& d);

SymTensor abs_tensor(const SymTensor& t);
SymTensor scaled(const SymTensor& t, double factor);

/// sum_i coeffs[i] * tensors[i]; every tensor must have the given shape.
SymTensor linear_combine(std::span<const double> coeffs, std::span<const SymTensor> tensors, int order, int dim);

/// (T x^{k-1})_i = sum over i_2..i_k of t_{i i_2 ... i_k} x_{i_2} ... x_{i_k}.
std::vector<double> apply_tensor(const SymTensor& t, std::span<const double> x);

/// T x^k, evaluated directly from the stored multisets.
double form(const SymTensor& t, std::span<const double> x);

/// Dense row-major k-way array; position (i_1,...,i_k) is at sum_j i_j v^{k-j}.
struct DenseTensor {
  int order = 0;
  int dim = 0;
  std::vector<double> data;

  double operator()(std::span<const int> index) const;
};

inline constexpr std::size_t kDefaultDenseCap = 10'000'000;

DenseTensor densify(const SymTensor& t, std::size_t cap = kDefaultDenseCap);

/// Text dump: header `k v nnz`, then `i_1 ... i_k value` per stored key in key order.
std::string dump_tensor(const SymTensor& t);
SymTensor parse_tensor_dump(std::string_view text);

}  // namespace bibd
