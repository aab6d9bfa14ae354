#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bibd {

using Point = int;
using Block = std::vector<Point>;

/// Thrown for malformed parameters, files, and lookups in the design layer.
class DesignError : public std::runtime_error {
 public:
  enum class Kind { InvalidRange, NonIntegerParameter, SyntaxError, IndexOutOfRange, UnknownName };

  DesignError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct DesignParams {
  int v = 0;
  int k = 0;
  int lambda = 0;
  int r = 0;
  int b = 0;

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

/// Computes r and b from (v, k, lambda) using b*k = v*r and lambda*(v-1) = r*(k-1).
/// Throws DesignError::InvalidRange unless v > k >= 2 and lambda >= 1, and
/// DesignError::NonIntegerParameter when either division is inexact.
DesignParams derive_parameters(int v, int k, int lambda);

/// A block family as read from a file or produced by a caller, not yet checked.
struct RawDesign {
  int v = 0;
  int k = 0;
  int lambda = 0;
  std::vector<Block> blocks;
};

enum class ViolationKind { ParamIdentity, InvalidRange, BlockSize, DuplicateBlock, Degree, CoDegree, IndexRange };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string witness;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

/// Checks every axiom of a simple (v,k,lambda)-BIBD and reports each failure with a witness.
ValidationReport validate(const RawDesign& candidate);

/// A validated simple BIBD. Blocks are sorted internally and the block list is
/// sorted lexicographically, so equality is structural.
class Design {
 public:
  /// Validates and canonicalizes; throws std::invalid_argument listing the violations.
  static Design from_raw(RawDesign raw);

  const DesignParams& params() const { return params_; }
  int v() const { return params_.v; }
  int k() const { return params_.k; }
  int lambda() const { return params_.lambda; }
  int r() const { return params_.r; }
  int b() const { return params_.b; }
  const std::vector<Block>& blocks() const { return blocks_; }

  RawDesign to_raw() const { return {params_.v, params_.k, params_.lambda, blocks_}; }

  friend bool operator==(const Design&, const Design&) = default;

 private:
  Design(DesignParams params, std::vector<Block> blocks) : params_(params), blocks_(std::move(blocks)) {}

  DesignParams params_;
  std::vector<Block> blocks_;
};

/// Sorts each block and the block list.
void canonicalize(RawDesign& raw);

/// Degree d(i) of every point for an arbitrary block family on v points.
std::vector<int> point_degrees(int v, const std::vector<Block>& blocks);

/// Co-degree d(i,j), row-major v x v, zero diagonal.
std::vector<int> pair_codegrees(int v, const std::vector<Block>& blocks);

/// True if the hypergraph on v points with these blocks is connected.
bool is_connected(int v, const std::vector<Block>& blocks);

// --- generation ---

enum class SearchStatus { Found, BudgetExhausted, SpaceExhausted };

struct GenerateResult {
  SearchStatus status = SearchStatus::BudgetExhausted;
  std::vector<Block> blocks;  // filled when Found
  std::int64_t nodes = 0;
};

/// Backtracking search for a simple design with the given parameters.
///
/// Blocks are placed one at a time; the next block must contain the smallest
/// point whose degree is still below r, and must follow the previous block in a
/// candidate order. The seed permutes candidate order within each leading-point
/// group (seed 0 is plain lexicographic order). Pruning rejects any block that
/// would push a point above r or a pair above lambda. SpaceExhausted is only
/// reported when the whole tree was searched within budget.
GenerateResult generate(const DesignParams& params, std::int64_t budget, std::uint64_t seed);

/// Like generate, but returns a Design and throws std::runtime_error when no design was found.
Design generate_design(const DesignParams& params, std::int64_t budget, std::uint64_t seed);

// --- catalog ---

/// Names of the built-in designs, in listing order.
const std::vector<std::string>& catalog_names();

/// Built-in design by name; throws DesignError::UnknownName.
const Design& catalog(std::string_view name);

// --- text format ---

/// Parses the `.bibd` format: `#` comments, a `v k lambda` line, then one block per line.
/// The result is canonicalized but not validated.
RawDesign parse_design(std::string_view text);
std::string serialize_design(const Design& design);

RawDesign read_design_file(const std::string& path);

}  // namespace bibd
