#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bibd/sstensor.hpp"

namespace bibd {

class SpectraError : public std::runtime_error {
 public:
  enum class Kind { NotNonnegative, ZeroIterate, NotSymmetric, BadInput };

  SpectraError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

enum class EigenKind { H, Z };

std::string_view to_string(EigenKind kind);

/// A real eigenpair with the residual of its defining equation.
///
/// H pairs satisfy T x^{k-1} = value * x^{[k-1]} with sum |x_i|^k = 1;
/// Z pairs satisfy T x^{k-1} = value * x with sum x_i^2 = 1.
struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  EigenKind kind = EigenKind::H;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// max_i |(T x^{k-1})_i - value * x_i^{k-1}| (H) or |(T x^{k-1})_i - value * x_i| (Z).
double eigen_residual(const SymTensor& t, double value, std::span<const double> x, EigenKind kind);

/// Rescales x so that sum |x_i|^p = 1.
void normalize_p(std::vector<double>& x, int p);

// --- largest H-eigenvalue of a nonnegative tensor ---

struct NqzOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  /// Strictly positive start; empty means the all-ones vector.
  std::vector<double> start;
  /// When an iterate loses positivity, retry with eps = 1e-9 * max entry added to
  /// every multiset entry.
  bool shift_fallback = true;
};

struct NqzResult {
  EigenPair pair;
  double lower = 0.0;
  double upper = 0.0;
  /// Per-entry perturbation used by the fallback, 0 when none was needed. The
  /// value and bracket then belong to the perturbed tensor; the residual is
  /// still measured against the input.
  double shift = 0.0;
  /// (lower, upper) after every iteration.
  std::vector<std::pair<double, double>> history;
};

/// Ratio-bracketing power iteration for the spectral radius of a nonnegative tensor.
///
/// Each step forms y = T x^{k-1}, brackets the eigenvalue between
/// min_i y_i / x_i^{k-1} and max_i y_i / x_i^{k-1}, and continues from
/// y^{[1/(k-1)]}. Stops when the bracket is narrower than tol; the returned
/// value is its midpoint. Throws NotNonnegative for a negative entry and
/// ZeroIterate when an iterate loses positivity and the fallback is disabled.
NqzResult nqz_largest_h(const SymTensor& t, const NqzOptions& options = {});

// --- Z-eigenpairs ---

struct SshopmOptions {
  /// Empty means 1 + sum over dense rows of the absolute row sum.
  std::optional<double> shift;
  /// Unit start; empty means the normalized all-ones vector.
  std::vector<double> start;
  double tol = 1e-8;
  int max_iter = 20000;
  /// false runs the concave variant x <- normalize(shift*x - T x^{k-1}).
  bool maximize = true;
};

double default_sshopm_shift(const SymTensor& t);

/// Shifted symmetric higher-order power method.
EigenPair sshopm_z(const SymTensor& t, const SshopmOptions& options = {});

// --- variational extremes of T x^k ---

enum class Objective { Max, Min };
enum class Constraint { KNormSphere, TwoNormSphere, Simplex };

std::string_view to_string(Constraint c);

struct ExtremeOptions {
  Objective objective = Objective::Max;
  Constraint constraint = Constraint::TwoNormSphere;
  int restarts = 16;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iter = 5000;
};

struct RestartOutcome {
  double value = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> point;
};

struct ExtremeResult {
  double best = 0.0;
  std::vector<double> argbest;
  std::vector<RestartOutcome> restarts;
};

/// Deterministic start point for restart `index` on the given constraint set.
/// KNormSphere starts are nonnegative for odd k.
std::vector<double> restart_start(Constraint constraint, int order, int dim, std::uint64_t seed, int index);

/// Multi-start projected gradient ascent/descent on T x^k.
///
/// On the k-norm sphere with odd k the search is confined to x >= 0. The best
/// value is a one-sided bound: never above the true max, never below the true min.
ExtremeResult extreme_form(const SymTensor& t, const ExtremeOptions& options);

// --- localization ---

struct GershgorinRow {
  double center = 0.0;
  double radius = 0.0;
};

struct GershgorinReport {
  std::vector<GershgorinRow> rows;
  double lower = 0.0;  // min(center - radius)
  double upper = 0.0;  // max(center + radius)
  /// Set when an expected value was supplied: every center and radius equals it.
  std::optional<bool> closed_form_match;

  bool contains(double eigenvalue, double tol = 0.0) const;
};

/// Row centers and off-diagonal absolute row sums, counted from the stored
/// multisets (no dense expansion). `expected` is compared against every center
/// and radius with relative tolerance 1e-12.
GershgorinReport gershgorin(const SymTensor& t, std::optional<double> expected = {});

// --- oracles ---

struct MatrixEigen {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // unit, matching values
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a dense symmetric n x n row-major matrix.
MatrixEigen jacobi_eigen(std::vector<double> matrix, int n);

/// Full spectrum of an order-2 tensor; throws BadInput unless k == 2.
MatrixEigen matrix_eigen_oracle(const SymTensor& t);

struct TinySpectrum {
  std::vector<EigenPair> pairs;  // sorted by value, then vector
  /// True when every direction is an eigenvector; pairs then holds samples.
  bool degenerate = false;
};

/// All real H-eigenpairs of a dimension-2 tensor via the univariate polynomial in x_1/x_0.
TinySpectrum tiny_h_spectrum(const SymTensor& t);

struct Certificate {
  double residual = 0.0;
  bool pass = false;
};

/// Recomputes the defining residual by enumerating index permutations,
/// independently of apply_tensor().
Certificate certify(const SymTensor& t, const EigenPair& pair, double tol);

}  // namespace bibd
