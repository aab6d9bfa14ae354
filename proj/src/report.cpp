#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bibd/analysis.hpp"

namespace bibd {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  std::string s = buf;
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

const ClauseRecord& TheoremReport::clause(char c) const {
  for (const auto& rec : clauses)
    if (rec.clause == c) return rec;
  throw std::out_of_range(std::string("no clause ") + c);
}

bool TheoremReport::ok() const {
  return std::none_of(clauses.begin(), clauses.end(), [](const ClauseRecord& c) {
    return c.verdict == Verdict::Falsified || c.verdict == Verdict::Error;
  });
}

namespace {

std::string vec_text(const std::vector<double>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + format_number(x[i]);
  return s + ")";
}

std::string points_text(const std::vector<Point>& pts) {
  std::string s = "{";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? "," : "") + std::to_string(pts[i]);
  return s + "}";
}

ClauseRecord error_clause(char c, std::uint64_t seed, const std::exception& e) {
  ClauseRecord rec;
  rec.clause = c;
  rec.verdict = Verdict::Error;
  rec.measured = std::numeric_limits<double>::quiet_NaN();
  rec.expected = std::numeric_limits<double>::quiet_NaN();
  rec.method = "error";
  rec.seed = seed;
  rec.details.emplace_back("error", e.what());
  return rec;
}

}  // namespace

TheoremReport verify_theorem(const Design& d, const AnalysisOptions& options, std::string name) {
  TheoremReport report;
  report.name = std::move(name);
  report.params = d.params();
  report.seed = options.seed;

  const int k = d.k();
  const double center = 2.0 * d.r() * (k - 1);
  const double radius_q = 2.0 * center;
  const auto p = characterization_tensor(d);
  const auto q = signless_characterization_tensor(d);
  const auto ev = options.evidence();

  // Sub-analyses first; clause records are assembled afterwards in fixed order.
  std::optional<ComparisonRecord> cmp;
  std::string cmp_error;
  try {
    cmp = mu_max_comparison(d, options);
    report.eigenvalues.emplace_back("nqz(Q)", cmp->q_side.pair.value);
    if (cmp->p_estimate && k % 2 == 0) report.eigenvalues.emplace_back("P-max(" + cmp->p_method + ")", *cmp->p_estimate);
  } catch (const std::exception& e) {
    cmp_error = e.what();
  }
  if (k == 2) {
    for (double x : matrix_eigen_oracle(p).values) report.eigenvalues.emplace_back("jacobi(P)", x);
    for (double x : matrix_eigen_oracle(q).values) report.eigenvalues.emplace_back("jacobi(Q)", x);
  }

  std::vector<std::pair<std::string, EvidenceRecord>> evidence;
  std::string evidence_error;
  try {
    evidence.emplace_back("copositivity(P)", copositivity_evidence(p, ev));
    evidence.emplace_back("copositivity(Q)", copositivity_evidence(q, ev));
    if (k % 2 == 0) {
      evidence.emplace_back("psd(P)", psd_evidence(p, ev));
      evidence.emplace_back("psd(Q)", psd_evidence(q, ev));
    }
  } catch (const std::exception& e) {
    evidence_error = e.what();
  }
  for (const auto& [label, rec] : evidence)
    for (double z : rec.z_eigenvalues) report.eigenvalues.emplace_back("sshopm-z:" + label, z);

  // (a) Gershgorin localization.
  try {
    ClauseRecord a;
    a.clause = 'a';
    a.seed = options.seed;
    a.method = "gershgorin(multiset-count)";
    a.expected = center;
    a.tol = 1e-12 * center;
    double reach = 0.0;
    for (const auto& [label, t] : {std::pair<std::string, const SymTensor&>{"P", p}, {"Q", q}}) {
      const auto g = gershgorin(t, center);
      double cmin = g.rows.front().center, cmax = cmin, rmin = g.rows.front().radius, rmax = rmin;
      for (const auto& row : g.rows) {
        cmin = std::min(cmin, row.center);
        cmax = std::max(cmax, row.center);
        rmin = std::min(rmin, row.radius);
        rmax = std::max(rmax, row.radius);
        reach = std::max(reach, std::abs(row.center - center) + row.radius);
      }
      a.details.emplace_back(label + ".centers", "[" + format_number(cmin) + "," + format_number(cmax) + "]");
      a.details.emplace_back(label + ".radii", "[" + format_number(rmin) + "," + format_number(rmax) + "]");
      a.details.emplace_back(label + ".center=radius=2r(k-1)", *g.closed_form_match ? "true" : "false");
      a.details.emplace_back(label + ".interval", "[" + format_number(g.lower) + "," + format_number(g.upper) + "]");
    }
    a.measured = reach;
    bool inside = true;
    std::vector<std::string> labels;
    for (const auto& [label, x] : report.eigenvalues)
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    for (const auto& label : labels) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      std::size_t count = 0;
      for (const auto& [l, x] : report.eigenvalues) {
        if (l != label) continue;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        ++count;
      }
      const bool in = lo >= -options.eigen_tol && hi <= radius_q + options.eigen_tol;
      inside = inside && in;
      a.details.emplace_back("eigenvalues[" + label + "]", std::to_string(count) + " in [" + format_number(lo) + "," +
                                                               format_number(hi) + "]" +
                                                               (in ? " within" : " OUTSIDE") + " [0," +
                                                               format_number(radius_q) + "]");
    }
    a.verdict = reach <= center + a.tol && inside ? Verdict::Verified : Verdict::Falsified;
    if (a.verdict == Verdict::Falsified) report.findings.push_back("clause (a): eigenvalue or disc outside [0, 4r(k-1)]");
    report.clauses.push_back(std::move(a));
  } catch (const std::exception& e) {
    report.clauses.push_back(error_clause('a', options.seed, e));
  }

  // (b) spectral radius of Q.
  if (cmp) {
    ClauseRecord b;
    b.clause = 'b';
    b.seed = options.seed;
    b.method = "nqz+certify(all-ones)";
    b.expected = radius_q;
    b.tol = options.eigen_tol;
    b.measured = cmp->q_side.pair.value;
    EigenPair ones;
    ones.kind = EigenKind::H;
    ones.value = radius_q;
    ones.vector.assign(d.v(), 1.0);
    normalize_p(ones.vector, k);
    const auto cert = certify(q, ones, options.certify_tol);
    b.details.emplace_back("nqz.bracket", "[" + format_number(cmp->q_side.lower) + "," +
                                              format_number(cmp->q_side.upper) + "]");
    b.details.emplace_back("nqz.iterations", std::to_string(cmp->q_side.pair.iterations));
    b.details.emplace_back("nqz.converged", cmp->q_side.pair.converged ? "true" : "false");
    b.details.emplace_back("nqz.residual", format_number(cmp->q_side.pair.residual));
    b.details.emplace_back("nqz.shift", format_number(cmp->q_side.shift));
    b.details.emplace_back("certificate.residual(all-ones)", format_number(cert.residual));
    b.details.emplace_back("certificate.tol", format_number(options.certify_tol));
    const bool match = std::abs(b.measured - b.expected) <= b.tol;
    b.verdict = match && cert.pass && cmp->q_side.pair.converged ? Verdict::Verified : Verdict::Falsified;
    if (b.verdict == Verdict::Falsified) report.findings.push_back("clause (b): rho(Q) != 4r(k-1)");
    report.clauses.push_back(std::move(b));
  } else {
    report.clauses.push_back(error_clause('b', options.seed, std::runtime_error(cmp_error)));
  }

  // (c) copositivity and, for even k, semidefiniteness.
  if (evidence_error.empty()) {
    ClauseRecord c;
    c.clause = 'c';
    c.seed = options.seed;
    c.expected = 0.0;
    c.tol = options.evidence_tol;
    c.measured = std::numeric_limits<double>::infinity();
    c.verdict = Verdict::EvidenceOnly;
    c.method = k % 2 == 0 ? "copositivity(grid+multistart)+psd(multistart+sshopm)" : "copositivity(grid+multistart)";
    for (const auto& [label, rec] : evidence) {
      c.measured = std::min(c.measured, rec.minimum);
      c.details.emplace_back(label + ".minimum", format_number(rec.minimum));
      c.details.emplace_back(label + ".method", rec.method);
      for (const auto& [m, v] : rec.minima) c.details.emplace_back(label + "." + m, format_number(v));
      c.details.emplace_back(label + ".witness", vec_text(rec.witness));
      if (rec.verdict == Verdict::Falsified) {
        c.verdict = Verdict::Falsified;
        report.findings.push_back("clause (c): " + label + " has T x^k = " + format_number(rec.minimum) + " at " +
                                  vec_text(rec.witness));
      }
    }
    // For matrices the smallest eigenvalue settles both properties exactly.
    if (k == 2 && c.verdict != Verdict::Falsified) {
      const double p_min = matrix_eigen_oracle(p).values.back();
      const double q_min = matrix_eigen_oracle(q).values.back();
      c.details.emplace_back("P.lambda_min", format_number(p_min) + " (jacobi)");
      c.details.emplace_back("Q.lambda_min", format_number(q_min) + " (jacobi)");
      c.method += "+jacobi";
      if (std::min(p_min, q_min) >= -options.eigen_tol) {
        c.verdict = Verdict::Verified;
      } else {
        c.verdict = Verdict::Falsified;
        report.findings.push_back("clause (c): negative matrix eigenvalue " + format_number(std::min(p_min, q_min)));
      }
    }
    report.clauses.push_back(std::move(c));
  } else {
    report.clauses.push_back(error_clause('c', options.seed, std::runtime_error(evidence_error)));
  }

  // (d) largest H-eigenvalues and the odd-bipartite equality case.
  if (cmp) {
    ClauseRecord dd;
    dd.clause = 'd';
    dd.seed = options.seed;
    dd.tol = options.evidence_tol;
    dd.expected = cmp->q_side.pair.value;
    dd.method = "nqz(Q)+" + cmp->p_method;
    dd.measured = cmp->p_estimate.value_or(std::numeric_limits<double>::quiet_NaN());
    dd.details.emplace_back("Q.mu_max", format_number(cmp->q_side.pair.value) + " (nqz)");
    if (cmp->q_oracle) dd.details.emplace_back("Q.mu_max.oracle", format_number(*cmp->q_oracle) + " (jacobi)");
    dd.details.emplace_back("P.side", cmp->p_applicable ? format_number(*cmp->p_estimate) + " (" + cmp->p_method + ")"
                                                        : "not-applicable (k odd)");
    dd.details.emplace_back("inequality", cmp->inequality_holds ? "holds" : "VIOLATED");
    dd.details.emplace_back("odd-bipartite.subsets_checked", std::to_string(cmp->odd.subsets_checked));
    dd.details.emplace_back("odd-bipartite.exhaustive", cmp->odd.exhaustive ? "true" : "false");
    dd.details.emplace_back("odd-bipartite.witness", cmp->odd.witness ? points_text(*cmp->odd.witness) : "none");
    if (!cmp->odd.applicable) dd.details.emplace_back("odd-bipartite.applicable", "false (k odd)");
    dd.details.emplace_back("equality.verdict", std::string(to_string(cmp->equality_verdict)));
    dd.details.emplace_back("equality.note", cmp->equality_note);

    if (!cmp->p_applicable) {
      dd.verdict = Verdict::NotApplicable;
    } else if (!cmp->inequality_holds) {
      dd.verdict = Verdict::Falsified;
    } else if (cmp->p_certified) {
      // Exact on both sides: equality must coincide with odd-bipartiteness.
      const bool equal = std::abs(*cmp->p_estimate - cmp->q_side.pair.value) <= options.eigen_tol;
      const bool consistent = equal == cmp->odd.witness.has_value();
      dd.details.emplace_back("strict", equal ? "false" : "true");
      dd.verdict = consistent ? Verdict::Verified : Verdict::Falsified;
    } else {
      dd.verdict = cmp->equality_verdict == Verdict::Falsified ? Verdict::Falsified : Verdict::EvidenceOnly;
    }
    if (dd.verdict == Verdict::Falsified) report.findings.push_back("clause (d): mu_max comparison failed");
    report.clauses.push_back(std::move(dd));
  } else {
    report.clauses.push_back(error_clause('d', options.seed, std::runtime_error(cmp_error)));
  }
  return report;
}

std::string to_machine(const TheoremReport& report) {
  std::ostringstream out;
  for (const auto& c : report.clauses) {
    out << "clause=" << c.clause << " verdict=" << to_string(c.verdict) << " measured=" << format_number(c.measured)
        << " expected=" << format_number(c.expected) << " tol=" << format_number(c.tol) << " method=" << c.method
        << " seed=" << c.seed << '\n';
  }
  return out.str();
}

std::string to_text(const TheoremReport& report) {
  std::ostringstream out;
  const auto& p = report.params;
  out << "design: " << (report.name.empty() ? "(unnamed)" : report.name) << '\n'
      << "v: " << p.v << "\nk: " << p.k << "\nlambda: " << p.lambda << "\nr: " << p.r << "\nb: " << p.b << '\n'
      << "seed: " << report.seed << '\n';
  for (const auto& f : report.findings) out << "FINDING: " << f << '\n';
  for (const auto& c : report.clauses) {
    out << "\nclause: " << c.clause << '\n'
        << "verdict: " << to_string(c.verdict) << '\n'
        << "measured: " << format_number(c.measured) << '\n'
        << "expected: " << format_number(c.expected) << '\n'
        << "tol: " << format_number(c.tol) << '\n'
        << "method: " << c.method << '\n'
        << "seed: " << c.seed << '\n';
    for (const auto& [key, value] : c.details) out << key << ": " << value << '\n';
  }
  return out.str();
}

}  // namespace bibd
