#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bibd/design.hpp"
#include "bibd/spectra.hpp"
#include "bibd/sstensor.hpp"

namespace bibd {

class AnalysisError : public std::runtime_error {
 public:
  enum class Kind { TooLarge, OddOrder };

  AnalysisError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// --- odd-bipartiteness ---

struct OddBipartiteResult {
  bool applicable = false;  // k even; the search itself runs for every k
  std::optional<std::vector<Point>> witness;
  /// True when all 2^v subsets were examined.
  bool exhaustive = false;
  std::uint64_t subsets_checked = 0;
};

/// True when |e ∩ subset| is odd for every block e.
bool meets_every_block_oddly(const std::vector<Block>& blocks, const std::vector<Point>& subset);

/// Search over the 2^v point subsets in increasing bitmask order, stopping at
/// the first witness. Runs for every k. For odd k the full point set is always
/// a witness, so the result is marked not applicable.
/// Throws TooLarge when v exceeds max_v.
OddBipartiteResult odd_bipartite_search(const Design& d, int max_v = 24);

// --- evidence for copositivity and semidefiniteness ---

enum class Verdict { Verified, Falsified, EvidenceOnly, NotApplicable, Error };

std::string_view to_string(Verdict v);

struct EvidenceOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  int grid = 6;
  int grid_max_v = 9;
  /// Values below -tol falsify.
  double tol = 1e-6;
  double stationarity_tol = 1e-8;
  int max_iter = 5000;
  /// Tolerance for certifying Z-eigenpairs found by the concave power method.
  double certify_tol = 1e-8;
};

struct EvidenceRecord {
  Verdict verdict = Verdict::EvidenceOnly;
  double minimum = 0.0;
  std::vector<double> witness;
  std::string method;
  /// Per-method minima, keyed by method name.
  std::map<std::string, double> minima;
  std::size_t grid_points = 0;
  /// Certified Z-eigenvalues found along the way (semidefiniteness only).
  std::vector<double> z_eigenvalues;
};

/// Minimum of T x^k over the simplex, by multistart projected gradient plus a
/// sweep of all simplex points with coordinates in multiples of 1/grid.
EvidenceRecord copositivity_evidence(const SymTensor& t, const EvidenceOptions& options);

/// Minimum of T x^k over the unit sphere, by multistart projected gradient plus
/// the concave shifted power method from each start. Throws OddOrder for odd k.
EvidenceRecord psd_evidence(const SymTensor& t, const EvidenceOptions& options);

// --- options shared by the design-level analyses ---

struct AnalysisOptions {
  std::uint64_t seed = 0;
  int restarts = 32;
  int grid = 6;
  int max_iter = 5000;
  /// NQZ bracket width.
  double bracket_tol = 1e-10;
  /// Agreement between a computed eigenvalue and its predicted value.
  double eigen_tol = 1e-8;
  /// Residual bound for the all-ones eigenvector certificate.
  double certify_tol = 1e-10;
  /// Falsification threshold for the variational checks.
  double evidence_tol = 1e-6;
  double stationarity_tol = 1e-8;
  /// Overrides the power-method shift when set.
  std::optional<double> shift;
  int max_odd_bipartite_v = 24;

  EvidenceOptions evidence() const;
};

// --- largest H-eigenvalue comparison ---

struct ComparisonRecord {
  NqzResult q_side;
  bool p_applicable = false;
  std::optional<double> p_estimate;
  std::string p_method;
  bool p_certified = false;  // matrix oracle (k = 2)
  std::optional<double> q_oracle;
  bool inequality_holds = true;
  OddBipartiteResult odd;
  /// Equality of P and Q maxima (and H-spectra) for odd-bipartite designs.
  Verdict equality_verdict = Verdict::NotApplicable;
  std::string equality_note;
};

ComparisonRecord mu_max_comparison(const Design& d, const AnalysisOptions& options);

// --- sign-flip experiment on dimension-2 tensors ---

/// Entry-wise sign change by (-1)^(number of indices, with multiplicity, in subset).
SymTensor sign_flip(const SymTensor& t, const std::vector<Point>& subset);

struct SpectrumComparison {
  std::vector<double> first;
  std::vector<double> second;
  bool equal = false;
};

/// Compares the distinct real H-eigenvalues of two dimension-2 tensors.
SpectrumComparison compare_h_spectra(const SymTensor& a, const SymTensor& b, double tol = 1e-8);

// --- consolidated report ---

struct ClauseRecord {
  char clause = 'a';
  Verdict verdict = Verdict::NotApplicable;
  double measured = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  /// Supporting numbers in insertion order, each with its provenance.
  std::vector<std::pair<std::string, std::string>> details;
};

struct TheoremReport {
  std::string name;
  DesignParams params;
  std::uint64_t seed = 0;
  std::vector<ClauseRecord> clauses;  // a, b, c, d
  /// Results that would contradict the theorem for a valid design.
  std::vector<std::string> findings;
  /// Every eigenvalue computed while assembling the report, with its source.
  std::vector<std::pair<std::string, double>> eigenvalues;

  const ClauseRecord& clause(char c) const;
  bool ok() const;
};

TheoremReport verify_theorem(const Design& d, const AnalysisOptions& options, std::string name = {});

/// `clause=<c> verdict=<v> measured=<x> expected=<y> tol=<t> method=<m> seed=<s>`, one line per clause.
std::string to_machine(const TheoremReport& report);
/// Key: value blocks per clause.
std::string to_text(const TheoremReport& report);

/// Compact decimal form used in all machine output: shortest of %.15g, with ".0" on integers.
std::string format_number(double x);

}  // namespace bibd
