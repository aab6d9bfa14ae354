#include "bibd/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace bibd {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Verified: return "verified";
    case Verdict::Falsified: return "falsified";
    case Verdict::EvidenceOnly: return "evidence-only";
    case Verdict::NotApplicable: return "not-applicable";
    case Verdict::Error: return "error";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// odd-bipartiteness

bool meets_every_block_oddly(const std::vector<Block>& blocks, const std::vector<Point>& subset) {
  for (const auto& block : blocks) {
    std::size_t hits = 0;
    for (Point p : block) hits += std::count(subset.begin(), subset.end(), p);
    if (hits % 2 == 0) return false;
  }
  return true;
}

OddBipartiteResult odd_bipartite_search(const Design& d, int max_v) {
  OddBipartiteResult result;
  result.applicable = d.k() % 2 == 0;
  if (d.v() > max_v) {
    throw AnalysisError(AnalysisError::Kind::TooLarge,
                        "odd-bipartite search over 2^" + std::to_string(d.v()) + " subsets exceeds the limit 2^" +
                            std::to_string(max_v));
  }
  std::vector<std::uint32_t> masks;
  for (const auto& block : d.blocks()) {
    std::uint32_t m = 0;
    for (Point p : block) m |= 1u << p;
    masks.push_back(m);
  }
  const std::uint64_t total = std::uint64_t{1} << d.v();
  for (std::uint64_t y = 0; y < total; ++y) {
    ++result.subsets_checked;
    const auto ym = static_cast<std::uint32_t>(y);
    const bool odd = std::all_of(masks.begin(), masks.end(), [ym](std::uint32_t m) { return std::popcount(m & ym) & 1; });
    if (odd) {
      std::vector<Point> witness;
      for (int p = 0; p < d.v(); ++p)
        if (ym & (1u << p)) witness.push_back(p);
      result.witness = std::move(witness);
      break;
    }
  }
  result.exhaustive = result.subsets_checked == total;
  return result;
}

// ---------------------------------------------------------------------------
// evidence

namespace {

// Every composition of `total` into `parts` nonnegative parts, first coordinate descending.
template <typename F>
void for_each_composition(int parts, int total, std::vector<int>& cur, F&& visit) {
  if (static_cast<int>(cur.size()) == parts - 1) {
    cur.push_back(total);
    visit(cur);
    cur.pop_back();
    return;
  }
  for (int c = total; c >= 0; --c) {
    cur.push_back(c);
    for_each_composition(parts, total - c, cur, visit);
    cur.pop_back();
  }
}

}  // namespace

EvidenceRecord copositivity_evidence(const SymTensor& t, const EvidenceOptions& options) {
  EvidenceRecord rec;
  double best = std::numeric_limits<double>::infinity();
  std::string method;

  if (options.grid > 0 && t.dim() <= options.grid_max_v) {
    double grid_min = std::numeric_limits<double>::infinity();
    std::vector<double> x(t.dim());
    std::vector<int> cur;
    for_each_composition(t.dim(), options.grid, cur, [&](const std::vector<int>& c) {
      for (std::size_t i = 0; i < c.size(); ++i) x[i] = static_cast<double>(c[i]) / options.grid;
      const double f = form(t, x);
      ++rec.grid_points;
      if (f < grid_min) grid_min = f;
      if (f < best) {
        best = f;
        rec.witness = x;
      }
    });
    rec.minima["grid"] = grid_min;
    method = "grid(g=" + std::to_string(options.grid) + ")+";
  }

  ExtremeOptions eo;
  eo.objective = Objective::Min;
  eo.constraint = Constraint::Simplex;
  eo.restarts = options.restarts;
  eo.seed = options.seed;
  eo.tol = options.stationarity_tol;
  eo.max_iter = options.max_iter;
  const auto ms = extreme_form(t, eo);
  rec.minima["multistart"] = ms.best;
  if (ms.best < best) {
    best = ms.best;
    rec.witness = ms.argbest;
  }
  method += "multistart(" + std::to_string(options.restarts) + ")";

  rec.minimum = best;
  rec.method = "simplex:" + method;
  rec.verdict = best < -options.tol ? Verdict::Falsified : Verdict::EvidenceOnly;
  return rec;
}

EvidenceRecord psd_evidence(const SymTensor& t, const EvidenceOptions& options) {
  if (t.order() % 2 != 0) {
    throw AnalysisError(AnalysisError::Kind::OddOrder,
                        "semidefiniteness needs even order, got " + std::to_string(t.order()));
  }
  EvidenceRecord rec;
  ExtremeOptions eo;
  eo.objective = Objective::Min;
  eo.constraint = Constraint::TwoNormSphere;
  eo.restarts = options.restarts;
  eo.seed = options.seed;
  eo.tol = options.stationarity_tol;
  eo.max_iter = options.max_iter;
  const auto ms = extreme_form(t, eo);
  rec.minima["multistart"] = ms.best;
  double best = ms.best;
  rec.witness = ms.argbest;

  const double shift = default_sshopm_shift(t);
  double z_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < options.restarts; ++i) {
    SshopmOptions so;
    so.shift = shift;
    so.start = restart_start(Constraint::TwoNormSphere, t.order(), t.dim(), options.seed, i);
    so.tol = options.stationarity_tol;
    so.max_iter = options.max_iter;
    so.maximize = false;
    auto pair = sshopm_z(t, so);
    if (pair.converged && certify(t, pair, options.certify_tol).pass) rec.z_eigenvalues.push_back(pair.value);
    z_min = std::min(z_min, pair.value);
    if (pair.value < best) {
      best = pair.value;
      rec.witness = pair.vector;
    }
  }
  rec.minima["sshopm"] = z_min;
  rec.minimum = best;
  rec.method = "sphere:multistart(" + std::to_string(options.restarts) + ")+sshopm";
  rec.verdict = best < -options.tol ? Verdict::Falsified : Verdict::EvidenceOnly;
  return rec;
}

EvidenceOptions AnalysisOptions::evidence() const {
  EvidenceOptions e;
  e.restarts = restarts;
  e.seed = seed;
  e.grid = grid;
  e.tol = evidence_tol;
  e.stationarity_tol = stationarity_tol;
  e.max_iter = max_iter;
  return e;
}

// ---------------------------------------------------------------------------
// largest H-eigenvalues

ComparisonRecord mu_max_comparison(const Design& d, const AnalysisOptions& options) {
  ComparisonRecord rec;
  const auto p = characterization_tensor(d);
  const auto q = signless_characterization_tensor(d);

  NqzOptions no;
  no.tol = options.bracket_tol;
  no.max_iter = std::max(options.max_iter, 1);
  rec.q_side = nqz_largest_h(q, no);
  const double mu_q = rec.q_side.pair.value;
  rec.odd = odd_bipartite_search(d, options.max_odd_bipartite_v);

  const int k = d.k();
  if (k == 2) {
    rec.p_applicable = true;
    rec.p_estimate = matrix_eigen_oracle(p).values.front();
    rec.q_oracle = matrix_eigen_oracle(q).values.front();
    rec.p_method = "jacobi";
    rec.p_certified = true;
  } else if (k % 2 == 0) {
    rec.p_applicable = true;
    ExtremeOptions eo;
    eo.objective = Objective::Max;
    eo.constraint = Constraint::KNormSphere;
    eo.restarts = options.restarts;
    eo.seed = options.seed;
    eo.tol = options.stationarity_tol;
    eo.max_iter = options.max_iter;
    rec.p_estimate = extreme_form(p, eo).best;
    rec.p_method = "multistart(k-norm-sphere)";
  } else {
    rec.p_method = "none(k-odd)";
  }
  rec.inequality_holds = !rec.p_estimate || *rec.p_estimate <= mu_q + options.evidence_tol;

  if (!rec.odd.applicable) {
    rec.equality_note = "k odd: odd-bipartiteness undefined";
  } else if (!rec.odd.witness) {
    rec.equality_note = rec.odd.exhaustive ? "no odd-bipartite subset exists (exhaustive search)"
                                           : "no odd-bipartite subset found";
  } else {
    const bool agree = std::abs(*rec.p_estimate - mu_q) <= options.evidence_tol;
    rec.equality_verdict = agree ? (rec.p_certified ? Verdict::Verified : Verdict::EvidenceOnly) : Verdict::Falsified;
    rec.equality_note = agree ? "odd-bipartite witness found; largest H-eigenvalues of P and Q agree"
                              : "odd-bipartite witness found but largest H-eigenvalues of P and Q differ";
  }
  return rec;
}

// ---------------------------------------------------------------------------
// sign flips and dimension-2 spectra

SymTensor sign_flip(const SymTensor& t, const std::vector<Point>& subset) {
  SymTensor out(t.order(), t.dim());
  for (const auto& [key, value] : t.entries()) {
    std::size_t hits = 0;
    for (int i : key) hits += std::count(subset.begin(), subset.end(), i);
    out.set(key, hits % 2 ? -value : value);
  }
  return out;
}

SpectrumComparison compare_h_spectra(const SymTensor& a, const SymTensor& b, double tol) {
  auto distinct = [tol](const SymTensor& t) {
    std::vector<double> values;
    for (const auto& pair : tiny_h_spectrum(t).pairs) values.push_back(pair.value);
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (double v : values)
      if (out.empty() || std::abs(v - out.back()) > tol) out.push_back(v);
    return out;
  };
  SpectrumComparison cmp{distinct(a), distinct(b), false};
  cmp.equal = cmp.first.size() == cmp.second.size() &&
              std::equal(cmp.first.begin(), cmp.first.end(), cmp.second.begin(),
                         [tol](double x, double y) { return std::abs(x - y) <= tol; });
  return cmp;
}

}  // namespace bibd
