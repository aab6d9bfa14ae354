#include "bibd/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bibd/rng.hpp"

namespace bibd {

std::string_view to_string(EigenKind kind) { return kind == EigenKind::H ? "H" : "Z"; }

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::KNormSphere: return "k-norm-sphere";
    case Constraint::TwoNormSphere: return "2-norm-sphere";
    case Constraint::Simplex: return "simplex";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double signed_pow(double x, int p) {
  const double m = std::pow(std::abs(x), p);
  return x < 0 ? -m : m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void normalize_p(std::vector<double>& x, int p) {
  double s = 0.0;
  for (double xi : x) s += std::pow(std::abs(xi), p);
  if (s == 0.0) return;
  const double scale = std::pow(s, -1.0 / p);
  for (double& xi : x) xi *= scale;
}

double eigen_residual(const SymTensor& t, double value, std::span<const double> x, EigenKind kind) {
  const auto y = apply_tensor(t, x);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double rhs = kind == EigenKind::H ? signed_pow(x[i], t.order() - 1) : x[i];
    res = std::max(res, std::abs(y[i] - value * rhs));
  }
  return res;
}

// ---------------------------------------------------------------------------
// NQZ

namespace {

struct NqzRun {
  NqzResult result;
  bool lost_positivity = false;
};

// Iterates on `work`; the residual is measured against `original`.
NqzRun nqz_run(const SymTensor& work, const SymTensor& original, const NqzOptions& options, double perturbation) {
  const int k = work.order();
  const auto n = static_cast<std::size_t>(work.dim());
  NqzRun run;
  auto& res = run.result;
  res.shift = perturbation;

  std::vector<double> x = options.start.empty() ? std::vector<double>(n, 1.0) : options.start;
  normalize_p(x, k);
  double lower = 0.0, upper = 0.0;
  int iter = 0;
  bool converged = false;
  while (iter < options.max_iter) {
    ++iter;
    auto y = apply_tensor(work, x);
    lower = std::numeric_limits<double>::infinity();
    upper = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double xp = std::pow(x[i], k - 1);
      if (!(y[i] > 0.0)) {
        run.lost_positivity = true;
        return run;
      }
      const double ratio = y[i] / xp;
      lower = std::min(lower, ratio);
      upper = std::max(upper, ratio);
    }
    res.history.emplace_back(lower, upper);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(y[i], 1.0 / (k - 1));
    normalize_p(x, k);
    if (upper - lower <= options.tol) {
      converged = true;
      break;
    }
  }
  res.lower = lower;
  res.upper = upper;
  res.pair.value = 0.5 * (lower + upper);
  res.pair.vector = std::move(x);
  res.pair.kind = EigenKind::H;
  res.pair.iterations = iter;
  res.pair.converged = converged;
  res.pair.residual = eigen_residual(original, res.pair.value, res.pair.vector, EigenKind::H);
  return run;
}

}  // namespace

NqzResult nqz_largest_h(const SymTensor& t, const NqzOptions& options) {
  double max_entry = 0.0;
  for (const auto& [key, value] : t.entries()) {
    if (value < 0.0) {
      throw SpectraError(SpectraError::Kind::NotNonnegative, "tensor has a negative entry");
    }
    max_entry = std::max(max_entry, value);
  }
  if (!options.start.empty()) {
    if (options.start.size() != static_cast<std::size_t>(t.dim())) {
      throw SpectraError(SpectraError::Kind::BadInput, "start vector length does not match dimension");
    }
    for (double s : options.start)
      if (!(s > 0.0)) throw SpectraError(SpectraError::Kind::BadInput, "start vector must be strictly positive");
  }
  auto run = nqz_run(t, t, options, 0.0);
  if (!run.lost_positivity) return std::move(run.result);
  const double eps = 1e-9 * max_entry;
  if (!options.shift_fallback || eps == 0.0) {
    throw SpectraError(SpectraError::Kind::ZeroIterate, "iterate lost positivity (reducible tensor?)");
  }
  // Raising every entry by eps makes the tensor strictly positive, hence irreducible.
  SymTensor positive = t;
  IndexKey key(t.order(), 0);
  for (;;) {
    positive.add(key, eps);
    int j = t.order() - 1;
    while (j >= 0 && key[j] == t.dim() - 1) --j;
    if (j < 0) break;
    ++key[j];
    for (int m = j + 1; m < t.order(); ++m) key[m] = key[j];
  }
  run = nqz_run(positive, t, options, eps);
  if (run.lost_positivity) {
    throw SpectraError(SpectraError::Kind::ZeroIterate, "iterate lost positivity after perturbation");
  }
  return std::move(run.result);
}

// ---------------------------------------------------------------------------
// SS-HOPM

double default_sshopm_shift(const SymTensor& t) {
  const auto g = gershgorin(t);
  double total = 1.0;
  for (const auto& row : g.rows) total += std::abs(row.center) + row.radius;
  return total;
}

EigenPair sshopm_z(const SymTensor& t, const SshopmOptions& options) {
  const auto n = static_cast<std::size_t>(t.dim());
  const double alpha = options.shift.value_or(default_sshopm_shift(t));
  std::vector<double> x = options.start.empty() ? std::vector<double>(n, 1.0) : options.start;
  if (x.size() != n) throw SpectraError(SpectraError::Kind::BadInput, "start vector length does not match dimension");
  normalize_p(x, 2);

  EigenPair pair;
  pair.kind = EigenKind::Z;
  int iter = 0;
  for (;;) {
    const auto g = apply_tensor(t, x);
    const double lambda = dot(x, g);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(g[i] - lambda * x[i]));
    if (res <= options.tol) {
      pair.converged = true;
      break;
    }
    if (iter == options.max_iter) break;
    ++iter;
    for (std::size_t i = 0; i < n; ++i) x[i] = options.maximize ? g[i] + alpha * x[i] : alpha * x[i] - g[i];
    normalize_p(x, 2);
  }
  pair.value = form(t, x);
  pair.vector = std::move(x);
  pair.iterations = iter;
  pair.residual = eigen_residual(t, pair.value, pair.vector, EigenKind::Z);
  return pair;
}

// ---------------------------------------------------------------------------
// projected gradient on T x^k

namespace {

std::vector<double> project_simplex(std::vector<double> y) {
  std::vector<double> s = y;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cumsum += s[j];
    const double cand = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (s[j] - cand > 0.0) theta = cand;
  }
  for (double& yi : y) yi = std::max(yi - theta, 0.0);
  return y;
}

class FormSearch {
 public:
  FormSearch(const SymTensor& t, const ExtremeOptions& options)
      : t_(t),
        opt_(options),
        k_(t.order()),
        sign_(options.objective == Objective::Max ? 1.0 : -1.0),
        nonneg_(options.constraint == Constraint::Simplex ||
                (options.constraint == Constraint::KNormSphere && t.order() % 2 == 1)) {}

  RestartOutcome run(std::vector<double> x) const {
    retract(x);
    double f = sign_ * form(t_, x);
    double step = -1.0;
    RestartOutcome out;
    int iter = 0;
    for (;; ++iter) {
      const auto g = apply_tensor(t_, x);
      const auto [res, dir] = stationarity(x, g);
      out.stationarity = res;
      if (res <= opt_.tol) {
        out.converged = true;
        break;
      }
      if (iter == opt_.max_iter) break;
      if (step < 0.0) step = 1.0 / (1.0 + max_abs(g));
      bool accepted = false;
      while (step > 1e-18) {
        std::vector<double> trial(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + step * dir[i];
        retract(trial);
        const double ft = sign_ * form(t_, trial);
        // Near a stationary point objective changes drop below rounding; a
        // tie then counts as progress when the residual shrinks.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(f) + 1.0);
        const bool tie = ft <= f && ft >= f - noise &&
                         stationarity(trial, apply_tensor(t_, trial)).first < res;
        if (ft > f || tie) {
          x = std::move(trial);
          f = ft;
          accepted = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    out.iterations = iter;
    out.value = form(t_, x);
    out.point = std::move(x);
    return out;
  }

 private:
  void retract(std::vector<double>& x) const {
    switch (opt_.constraint) {
      case Constraint::Simplex:
        x = project_simplex(std::move(x));
        return;
      case Constraint::TwoNormSphere:
        normalize_p(x, 2);
        return;
      case Constraint::KNormSphere:
        if (nonneg_)
          for (double& xi : x) xi = std::max(xi, 0.0);
        normalize_p(x, k_);
        return;
    }
  }

  // First-order residual and search direction for the signed objective.
  std::pair<double, std::vector<double>> stationarity(const std::vector<double>& x, const std::vector<double>& g) const {
    const std::size_t n = x.size();
    std::vector<double> dir(n);
    double res = 0.0;
    switch (opt_.constraint) {
      case Constraint::TwoNormSphere: {
        const double mu = dot(x, g);
        for (std::size_t i = 0; i < n; ++i) {
          const double d = g[i] - mu * x[i];
          res = std::max(res, std::abs(d));
          dir[i] = sign_ * d;
        }
        break;
      }
      case Constraint::KNormSphere: {
        std::vector<double> normal(n);
        for (std::size_t i = 0; i < n; ++i) normal[i] = signed_pow(x[i], k_ - 1);
        const double mu = dot(x, g);
        const double proj = dot(g, normal) / dot(normal, normal);
        for (std::size_t i = 0; i < n; ++i) {
          const double kkt = g[i] - mu * normal[i];
          res = std::max(res, nonneg_ && x[i] == 0.0 ? std::max(0.0, sign_ * kkt) : std::abs(kkt));
          dir[i] = sign_ * (g[i] - proj * normal[i]);
        }
        break;
      }
      case Constraint::Simplex: {
        std::vector<double> moved(n);
        for (std::size_t i = 0; i < n; ++i) {
          dir[i] = sign_ * g[i];
          moved[i] = x[i] + dir[i];
        }
        const auto p = project_simplex(std::move(moved));
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(p[i] - x[i]));
        break;
      }
    }
    return {res, std::move(dir)};
  }

  const SymTensor& t_;
  ExtremeOptions opt_;
  int k_;
  double sign_;
  bool nonneg_;
};

}  // namespace

std::vector<double> restart_start(Constraint constraint, int order, int dim, std::uint64_t seed, int index) {
  SplitRng rng(seed, static_cast<std::uint64_t>(index));
  std::vector<double> x(dim);
  switch (constraint) {
    case Constraint::Simplex:
      for (double& xi : x) xi = -std::log(rng.uniform());
      {
        const double s = std::accumulate(x.begin(), x.end(), 0.0);
        for (double& xi : x) xi /= s;
      }
      break;
    case Constraint::TwoNormSphere:
      for (double& xi : x) xi = rng.normal();
      normalize_p(x, 2);
      break;
    case Constraint::KNormSphere:
      for (double& xi : x) xi = order % 2 == 1 ? std::abs(rng.normal()) : rng.normal();
      normalize_p(x, order);
      break;
  }
  return x;
}

ExtremeResult extreme_form(const SymTensor& t, const ExtremeOptions& options) {
  if (options.restarts < 1) throw SpectraError(SpectraError::Kind::BadInput, "restarts must be >= 1");
  const FormSearch search(t, options);
  ExtremeResult result;
  for (int i = 0; i < options.restarts; ++i) {
    result.restarts.push_back(search.run(restart_start(options.constraint, t.order(), t.dim(), options.seed, i)));
  }

  auto rounded = [](const std::vector<double>& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::round(p[i] * 1e12) / 1e12;
    return out;
  };
  const bool want_max = options.objective == Objective::Max;
  const RestartOutcome* best = &result.restarts.front();
  for (const auto& r : result.restarts) {
    const bool better = want_max ? r.value > best->value : r.value < best->value;
    if (better || (r.value == best->value && rounded(r.point) < rounded(best->point))) best = &r;
  }
  result.best = best->value;
  result.argbest = best->point;
  return result;
}

// ---------------------------------------------------------------------------
// Gershgorin

bool GershgorinReport::contains(double eigenvalue, double tol) const {
  return std::any_of(rows.begin(), rows.end(), [&](const GershgorinRow& row) {
    return std::abs(eigenvalue - row.center) <= row.radius + tol;
  });
}

GershgorinReport gershgorin(const SymTensor& t, std::optional<double> expected) {
  GershgorinReport report;
  report.rows.resize(t.dim());
  std::vector<int> counts;
  for (const auto& [key, value] : t.entries()) {
    std::vector<std::pair<int, int>> runs;
    for (int idx : key) {
      if (!runs.empty() && runs.back().first == idx)
        ++runs.back().second;
      else
        runs.emplace_back(idx, 1);
    }
    if (runs.size() == 1) {
      report.rows[runs[0].first].center = value;
      continue;
    }
    counts.resize(runs.size());
    for (std::size_t a = 0; a < runs.size(); ++a) {
      for (std::size_t c = 0; c < runs.size(); ++c) counts[c] = runs[c].second - (c == a ? 1 : 0);
      report.rows[runs[a].first].radius += std::abs(value) * multinomial(counts);
    }
  }
  report.lower = std::numeric_limits<double>::infinity();
  report.upper = -std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows) {
    report.lower = std::min(report.lower, row.center - row.radius);
    report.upper = std::max(report.upper, row.center + row.radius);
  }
  if (expected) {
    const double tol = 1e-12 * std::max(1.0, std::abs(*expected));
    report.closed_form_match = std::all_of(report.rows.begin(), report.rows.end(), [&](const GershgorinRow& row) {
      return std::abs(row.center - *expected) <= tol && std::abs(row.radius - *expected) <= tol;
    });
  }
  return report;
}

// ---------------------------------------------------------------------------
// Jacobi

MatrixEigen jacobi_eigen(std::vector<double> a, int n) {
  if (a.size() != static_cast<std::size_t>(n) * n) {
    throw SpectraError(SpectraError::Kind::BadInput, "matrix size does not match n");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a[i * n + j] != a[j * n + i]) throw SpectraError(SpectraError::Kind::NotSymmetric, "matrix is not symmetric");

  std::vector<double> vecs(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) vecs[i * n + i] = 1.0;
  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
  };

  MatrixEigen out;
  while (off_norm() >= 1e-12 && out.sweeps < 100) {
    ++out.sweeps;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double tan = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tan * tan + 1.0), s = tan * c;
        for (int r = 0; r < n; ++r) {
          const double arp = a[r * n + p], arq = a[r * n + q];
          a[r * n + p] = c * arp - s * arq;
          a[r * n + q] = s * arp + c * arq;
        }
        for (int r = 0; r < n; ++r) {
          const double apr = a[p * n + r], aqr = a[q * n + r];
          a[p * n + r] = c * apr - s * aqr;
          a[q * n + r] = s * apr + c * aqr;
        }
        for (int r = 0; r < n; ++r) {
          const double vrp = vecs[r * n + p], vrq = vecs[r * n + q];
          vecs[r * n + p] = c * vrp - s * vrq;
          vecs[r * n + q] = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i * n + i] > a[j * n + j]; });
  for (int idx : order) {
    out.values.push_back(a[idx * n + idx]);
    std::vector<double> col(n);
    for (int r = 0; r < n; ++r) col[r] = vecs[r * n + idx];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

MatrixEigen matrix_eigen_oracle(const SymTensor& t) {
  if (t.order() != 2) throw SpectraError(SpectraError::Kind::BadInput, "matrix oracle needs an order-2 tensor");
  return jacobi_eigen(densify(t).data, t.dim());
}

// ---------------------------------------------------------------------------
// dimension-2 H-spectrum

namespace {

using Poly = std::vector<double>;  // ascending coefficients

double eval(const Poly& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(i * p[i]);
  return d;
}

double bisect(const Poly& p, double lo, double hi) {
  double flo = eval(p, lo);
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = eval(p, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Sign-change roots on a uniform grid over [-bound, bound].
std::vector<double> grid_roots(const Poly& p, double bound, int cells) {
  std::vector<double> roots;
  double prev_x = -bound, prev_f = eval(p, prev_x);
  if (prev_f == 0.0) roots.push_back(prev_x);
  for (int c = 1; c <= cells; ++c) {
    const double x = -bound + 2.0 * bound * c / cells;
    const double f = eval(p, x);
    if (f == 0.0) {
      roots.push_back(x);
    } else if (prev_f != 0.0 && (f < 0) != (prev_f < 0)) {
      roots.push_back(bisect(p, prev_x, x));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

}  // namespace

TinySpectrum tiny_h_spectrum(const SymTensor& t) {
  if (t.dim() != 2) throw SpectraError(SpectraError::Kind::BadInput, "tiny_h_spectrum needs dimension 2");
  const int k = t.order();
  // With x = (1, s): f0(s) = (T x^{k-1})_0, f1(s) = (T x^{k-1})_1.
  Poly f0(k, 0.0), f1(k, 0.0);
  for (int ones = 0; ones <= k; ++ones) {
    IndexKey key(k, 1);
    std::fill_n(key.begin(), k - ones, 0);
    const double value = t.at(key);
    if (value == 0.0) continue;
    const int zeros = k - ones;
    if (zeros >= 1) {
      const int c[2] = {zeros - 1, ones};
      f0[ones] += value * multinomial(c);
    }
    if (ones >= 1) {
      const int c[2] = {zeros, ones - 1};
      f1[ones - 1] += value * multinomial(c);
    }
  }
  // p(s) = f1(s) - s^{k-1} f0(s)
  Poly p(2 * k - 1, 0.0);
  for (int i = 0; i < k; ++i) {
    p[i] += f1[i];
    p[i + k - 1] -= f0[i];
  }
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  for (double c : f0) scale = std::max(scale, std::abs(c));

  TinySpectrum out;
  auto push = [&](std::vector<double> x, double value) {
    normalize_p(x, k);
    EigenPair pair;
    pair.kind = EigenKind::H;
    pair.value = value;
    pair.vector = std::move(x);
    pair.residual = eigen_residual(t, value, pair.vector, EigenKind::H);
    pair.converged = pair.residual <= 1e-10 * std::max(1.0, scale);
    if (!pair.converged) return;
    for (const auto& q : out.pairs) {
      if (std::abs(q.value - pair.value) <= 1e-9 * std::max(1.0, std::abs(pair.value)) &&
          std::abs(q.vector[0] - pair.vector[0]) <= 1e-9 && std::abs(q.vector[1] - pair.vector[1]) <= 1e-9) {
        return;
      }
    }
    out.pairs.push_back(std::move(pair));
  };

  const double zero_tol = 1e-14 * std::max(1.0, scale);
  const bool p_is_zero = std::all_of(p.begin(), p.end(), [&](double c) { return std::abs(c) <= zero_tol; });

  // Axis directions.
  if (std::abs(eval(f1, 0.0)) <= zero_tol) push({1.0, 0.0}, eval(f0, 0.0));
  {
    // x = (0, 1): (T x^{k-1})_0 is the coefficient of the key with one zero.
    const double t0 = f0[k - 1], t1 = t.at(IndexKey(k, 1));
    if (std::abs(t0) <= zero_tol) push({0.0, 1.0}, t1);
  }

  if (p_is_zero) {
    out.degenerate = true;
    for (double s : {1.0, -1.0}) push({1.0, s}, eval(f0, s));
  } else {
    Poly trimmed = p;
    while (trimmed.size() > 1 && std::abs(trimmed.back()) <= zero_tol) trimmed.pop_back();
    double bound = 1.0;
    for (std::size_t i = 0; i + 1 < trimmed.size(); ++i)
      bound = std::max(bound, 1.0 + std::abs(trimmed[i] / trimmed.back()));
    if (trimmed.size() == 1) bound = 1.0;
    std::vector<double> candidates = grid_roots(trimmed, bound, 4096);
    // Even-multiplicity roots do not change sign; look at critical points too.
    const Poly dp = derivative(trimmed);
    if (dp.size() > 1) {
      for (double c : grid_roots(dp, bound, 4096))
        if (std::abs(eval(trimmed, c)) <= 1e-10 * std::max(1.0, scale)) candidates.push_back(c);
    }
    for (double s : candidates) push({1.0, s}, eval(f0, s));
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    return a.value != b.value ? a.value < b.value : a.vector < b.vector;
  });
  return out;
}

// ---------------------------------------------------------------------------
// certification

Certificate certify(const SymTensor& t, const EigenPair& pair, double tol) {
  const auto n = static_cast<std::size_t>(t.dim());
  const auto& x = pair.vector;
  if (x.size() != n) return {std::numeric_limits<double>::infinity(), false};
  std::vector<double> tx(n, 0.0);
  for (const auto& [key, value] : t.entries()) {
    IndexKey perm = key;
    do {
      double prod = value;
      for (std::size_t j = 1; j < perm.size(); ++j) prod *= x[perm[j]];
      tx[perm[0]] += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double rhs = x[i];
    if (pair.kind == EigenKind::H) {
      rhs = 1.0;
      for (int e = 0; e < t.order() - 1; ++e) rhs *= x[i];
    }
    res = std::max(res, std::abs(tx[i] - pair.value * rhs));
  }
  return {res, res <= tol};
}

}  // namespace bibd
