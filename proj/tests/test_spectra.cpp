#include <cmath>
#include <random>

#include "bibd/design.hpp"
#include "bibd/spectra.hpp"
#include "bibd/sstensor.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bibd;

namespace {

double rho_q(const Design& d) { return 4.0 * d.r() * (d.k() - 1); }

// max_i |(M x)_i - value * x_i|
double matrix_residual(const std::vector<double>& m, int n, double value, const std::vector<double>& x) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double y = 0.0;
    for (int j = 0; j < n; ++j) y += m[i * n + j] * x[j];
    worst = std::max(worst, std::abs(y - value * x[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("nqz examples") {
  const auto& pairs = catalog("pairs-4-2-1");
  const auto r = nqz_largest_h(signless_characterization_tensor(pairs));
  CHECK(std::abs(r.pair.value - 12.0) <= 1e-8);
  for (double x : r.pair.vector) CHECK(x == doctest::Approx(0.5).epsilon(1e-12));

  const auto f = nqz_largest_h(signless_characterization_tensor(catalog("fano-7-3-1")));
  CHECK(std::abs(f.pair.value - 24.0) <= 1e-8);
  CHECK(f.pair.converged);

  NqzOptions o;
  o.start = {0.3, 1.0, 2.0, 0.7, 1.5};
  const auto id = nqz_largest_h(identity_tensor(3, 5), o);
  CHECK(std::abs(id.pair.value - 1.0) <= 1e-10);
  for (double x : id.pair.vector) CHECK(x > 0.0);

  CHECK_THROWS_AS(nqz_largest_h(characterization_tensor(catalog("fano-7-3-1"))), SpectraError);
}

TEST_CASE("nqz bracket is monotone and brackets the answer") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int k : {3, 4}) {
    SymTensor t(k, 4);
    for (const auto& key : oracle::all_keys(k, 4)) t.set(key, u(rng));
    NqzOptions o;
    o.start = {1.0, 0.2, 0.5, 3.0};
    const auto r = nqz_largest_h(t, o);
    REQUIRE(r.history.size() >= 2);
    for (std::size_t i = 1; i < r.history.size(); ++i) {
      CHECK(r.history[i].first >= r.history[i - 1].first - 1e-12);
      CHECK(r.history[i].second <= r.history[i - 1].second + 1e-12);
    }
    CHECK(r.lower <= r.pair.value);
    CHECK(r.pair.value <= r.upper);
    CHECK(certify(t, r.pair, 1e-8).pass);
  }
}

TEST_CASE("nqz fallback on a reducible tensor") {
  // Point 2 is isolated, so its coordinate of every iterate decays to zero.
  SymTensor t(3, 3);
  t.set({0, 0, 0}, 2.0);
  t.set({0, 0, 1}, 1.0);
  NqzOptions strict;
  strict.shift_fallback = false;
  CHECK_THROWS_AS(nqz_largest_h(t, strict), SpectraError);

  // On the support {0,1}: 2 + 2/s = s^2 with s = sqrt(rho), solved by bisection.
  double lo = 1.0, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid - 2.0 * mid - 2.0 < 0.0 ? lo : hi) = mid;
  }
  const double rho = lo * lo;

  const auto r = nqz_largest_h(t);
  CHECK(r.shift == doctest::Approx(2e-9));
  CHECK(r.pair.converged);
  CHECK(std::abs(r.pair.value - rho) <= 1e-6);
  CHECK(r.pair.residual <= 1e-6);
}

TEST_CASE("nqz is the spectral radius for every catalog Q") {
  for (const auto& name : catalog_names()) {
    const auto& d = catalog(name);
    const auto q = signless_characterization_tensor(d);
    const auto r = nqz_largest_h(q);
    CAPTURE(name);
    CHECK(std::abs(r.pair.value - rho_q(d)) <= 1e-8);
    CHECK(certify(q, r.pair, 1e-10).pass);
  }
}

TEST_CASE("sshopm examples") {
  SshopmOptions o;
  o.shift = 2.0;
  o.start = {1.0, 0.0};
  const auto basis = sshopm_z(identity_tensor(4, 2), o);
  CHECK(basis.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(basis.vector[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(basis.vector[1]) <= 1e-12);

  o.start = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const auto mid = sshopm_z(identity_tensor(4, 2), o);
  CHECK(mid.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid.residual <= 1e-12);

  const auto q = sshopm_z(signless_characterization_tensor(catalog("pairs-4-2-1")));
  CHECK(std::abs(q.value - 12.0) <= 1e-8);
  for (double x : q.vector) CHECK(x == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(q.kind == EigenKind::Z);

  CHECK(default_sshopm_shift(identity_tensor(3, 4)) > 1.0);
}

TEST_CASE("converged sshopm pairs certify") {
  for (const auto& name : catalog_names()) {
    const auto& d = catalog(name);
    for (const auto& t : {characterization_tensor(d), signless_characterization_tensor(d)}) {
      for (bool maximize : {true, false}) {
        SshopmOptions o;
        o.maximize = maximize;
        o.start = restart_start(Constraint::TwoNormSphere, t.order(), t.dim(), 3, 1);
        const auto pair = sshopm_z(t, o);
        CAPTURE(name);
        if (pair.converged) {
          CHECK(certify(t, pair, 1e-6).pass);
          // Odd order: (mu, x) and (-mu, -x) are both Z-pairs, so only |mu| is bounded.
          if (d.k() % 2 == 0) CHECK(pair.value >= -1e-8);
          CHECK(std::abs(pair.value) <= rho_q(d) + 1e-8);
          if (d.k() % 2 == 1) {
            EigenPair mirrored = pair;
            mirrored.value = -pair.value;
            for (double& x : mirrored.vector) x = -x;
            CHECK(certify(t, mirrored, 1e-6).pass);
          }
        }
      }
    }
  }
}

TEST_CASE("extreme_form examples") {
  ExtremeOptions o;
  o.objective = Objective::Min;
  o.constraint = Constraint::Simplex;
  const auto p = extreme_form(characterization_tensor(catalog("pairs-4-2-1")), o);
  CHECK(std::abs(p.best - 1.5) <= 1e-8);
  for (double x : p.argbest) CHECK(std::abs(x - 0.25) <= 1e-6);
  CHECK(p.restarts.size() == 16);

  o.objective = Objective::Max;
  o.constraint = Constraint::KNormSphere;
  const auto q = extreme_form(signless_characterization_tensor(catalog("fano-7-3-1")), o);
  CHECK(q.best >= 24.0 - 1e-6);
  CHECK(q.best <= 24.0 + 1e-9);
  for (double x : q.argbest) CHECK(x >= 0.0);

  o.objective = Objective::Min;
  o.constraint = Constraint::TwoNormSphere;
  const auto i = extreme_form(identity_tensor(4, 3), o);
  CHECK(std::abs(i.best - 1.0 / 3.0) <= 1e-8);
  for (double x : i.argbest) CHECK(std::abs(std::abs(x) - 1.0 / std::sqrt(3.0)) <= 1e-4);
}

TEST_CASE("extreme_form is deterministic and bounds certified eigenvectors") {
  const auto& d = catalog("complement-fano-7-4-2");
  const auto q = signless_characterization_tensor(d);
  ExtremeOptions o;
  o.objective = Objective::Max;
  o.constraint = Constraint::KNormSphere;
  o.seed = 42;
  const auto a = extreme_form(q, o);
  const auto b = extreme_form(q, o);
  CHECK(a.best == b.best);
  CHECK(a.argbest == b.argbest);

  // The NQZ eigenvector lies on the k-norm sphere, so the maximum is at least its form.
  const auto r = nqz_largest_h(q);
  CHECK(a.best >= form(q, r.pair.vector) - 1e-6);

  // Same on the 2-norm sphere for a certified Z pair.
  SshopmOptions so;
  const auto z = sshopm_z(q, so);
  REQUIRE(certify(q, z, 1e-8).pass);
  o.constraint = Constraint::TwoNormSphere;
  CHECK(extreme_form(q, o).best >= form(q, z.vector) - 1e-6);
}

TEST_CASE("restart starts lie on their constraint sets") {
  for (int k : {3, 4}) {
    for (int i = 0; i < 5; ++i) {
      const auto s = restart_start(Constraint::Simplex, k, 5, 9, i);
      double sum = 0.0;
      for (double x : s) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

      const auto t = restart_start(Constraint::TwoNormSphere, k, 5, 9, i);
      double sq = 0.0;
      for (double x : t) sq += x * x;
      CHECK(sq == doctest::Approx(1.0).epsilon(1e-14));

      const auto kn = restart_start(Constraint::KNormSphere, k, 5, 9, i);
      double pk = 0.0;
      for (double x : kn) {
        if (k % 2 == 1) CHECK(x >= 0.0);
        pk += std::pow(std::abs(x), k);
      }
      CHECK(pk == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("gershgorin") {
  const auto& pairs = catalog("pairs-4-2-1");
  const auto g = gershgorin(signless_characterization_tensor(pairs));
  for (const auto& row : g.rows) {
    CHECK(row.center - row.radius == 0.0);
    CHECK(row.center + row.radius == 12.0);
  }
  for (double ev : {12.0, 4.0}) CHECK(g.contains(ev));

  const auto& fano = catalog("fano-7-3-1");
  const auto gp = gershgorin(characterization_tensor(fano), 12.0);
  REQUIRE(gp.closed_form_match.has_value());
  CHECK(*gp.closed_form_match);
  for (const auto& row : gp.rows) {
    CHECK(row.center == 12.0);
    CHECK(row.radius == doctest::Approx(12.0).epsilon(1e-14));
  }

  const auto gi = gershgorin(identity_tensor(3, 4));
  for (const auto& row : gi.rows) {
    CHECK(row.center == 1.0);
    CHECK(row.radius == 0.0);
  }
  CHECK(gi.lower == 1.0);
  CHECK(gi.upper == 1.0);

  // Radii from the stored multisets agree with dense absolute row sums.
  std::mt19937_64 rng(3);
  for (int k : {2, 3, 4}) {
    const auto t = oracle::random_tensor(k, 3, rng);
    const auto dense = densify(t);
    const auto report = gershgorin(t);
    const std::size_t row = dense.data.size() / 3;
    for (int i = 0; i < 3; ++i) {
      std::size_t diag = 0;
      for (int j = 1; j < k; ++j) diag = diag * 3 + i;
      double off = 0.0;
      for (std::size_t pos = 0; pos < row; ++pos)
        if (pos != diag) off += std::abs(dense.data[i * row + pos]);
      CHECK(report.rows[i].center == doctest::Approx(dense.data[i * row + diag]).epsilon(1e-14));
      CHECK(report.rows[i].radius == doctest::Approx(off).epsilon(1e-12));
    }
  }
}

TEST_CASE("jacobi oracle") {
  const auto d = jacobi_eigen({1, 0, 0, 0, 2, 0, 0, 0, 3}, 3);
  CHECK(d.values == std::vector<double>{3.0, 2.0, 1.0});

  const auto q = matrix_eigen_oracle(signless_characterization_tensor(catalog("pairs-4-2-1")));
  REQUIRE(q.values.size() == 4);
  CHECK(std::abs(q.values[0] - 12.0) <= 1e-10);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(q.values[i] - 4.0) <= 1e-10);
  for (double v : matrix_eigen_oracle(characterization_tensor(catalog("pairs-4-2-1"))).values)
    CHECK(std::abs(v - 6.0) <= 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {3, 5, 8}) {
    std::vector<double> m(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m[i * n + j] = m[j * n + i] = u(rng);
    const auto e = jacobi_eigen(m, n);
    double trace = 0.0, sum = 0.0;
    for (int i = 0; i < n; ++i) trace += m[i * n + i];
    for (int i = 0; i < n; ++i) {
      sum += e.values[i];
      CHECK(matrix_residual(m, n, e.values[i], e.vectors[i]) <= 1e-10);
      if (i > 0) CHECK(e.values[i] <= e.values[i - 1]);
    }
    CHECK(sum == doctest::Approx(trace).epsilon(1e-12));
  }
  CHECK_THROWS_AS(jacobi_eigen({1, 2, 3, 4}, 2), SpectraError);
  CHECK_THROWS_AS(matrix_eigen_oracle(identity_tensor(3, 2)), SpectraError);
}

TEST_CASE("k = 2 solvers agree with jacobi") {
  for (const char* name : {"pairs-4-2-1", "pairs-5-2-1"}) {
    const auto& d = catalog(name);
    for (const auto& t : {characterization_tensor(d), signless_characterization_tensor(d)}) {
      const auto m = matrix_eigen_oracle(t);
      CHECK(std::abs(nqz_largest_h(t).pair.value - m.values.front()) <= 1e-8);
      SshopmOptions o;
      o.start = restart_start(Constraint::TwoNormSphere, 2, d.v(), 0, 0);
      CHECK(std::abs(sshopm_z(t, o).value - m.values.front()) <= 1e-8);
      o.maximize = false;
      CHECK(std::abs(sshopm_z(t, o).value - m.values.back()) <= 1e-8);
    }
  }
}

TEST_CASE("tiny H spectrum") {
  const auto id = tiny_h_spectrum(identity_tensor(3, 2));
  REQUIRE_FALSE(id.pairs.empty());
  bool axis = false, uniform = false;
  for (const auto& p : id.pairs) {
    if (std::abs(p.value - 1.0) > 1e-10) continue;
    axis |= std::abs(p.vector[0]) < 1e-12 || std::abs(p.vector[1]) < 1e-12;
    uniform |= std::abs(p.vector[0] - p.vector[1]) < 1e-12;
  }
  CHECK(axis);
  CHECK(uniform);

  // k = 2: H and matrix eigenvalues coincide.
  SymTensor m(2, 2);
  m.set({0, 0}, 2.0);
  m.set({0, 1}, 1.0);
  m.set({1, 1}, -1.0);
  const auto tm = tiny_h_spectrum(m);
  const auto jm = matrix_eigen_oracle(m);
  REQUIRE(tm.pairs.size() >= 2);
  CHECK(tm.pairs.front().value == doctest::Approx(jm.values.back()).epsilon(1e-10));
  CHECK(tm.pairs.back().value == doctest::Approx(jm.values.front()).epsilon(1e-10));

  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = oracle::random_tensor(3, 2, rng, 1.0);
    for (const auto& p : tiny_h_spectrum(t).pairs) {
      CHECK(eigen_residual(t, p.value, p.vector, EigenKind::H) <= 1e-10 * std::max(1.0, std::abs(p.value)));
      CHECK(certify(t, p, 1e-9).pass);
    }
  }
  CHECK(tiny_h_spectrum(SymTensor(4, 2)).degenerate);
}

TEST_CASE("certify") {
  const auto q = signless_characterization_tensor(catalog("fano-7-3-1"));
  EigenPair pair;
  pair.kind = EigenKind::H;
  pair.vector.assign(7, std::pow(7.0, -1.0 / 3.0));
  pair.value = 24.0;
  const auto good = certify(q, pair, 1e-12);
  CHECK(good.pass);
  CHECK(good.residual <= 1e-12);

  // Off by one in the value: residual is |x_i|^2 = 7^{-2/3}.
  pair.value = 23.0;
  const auto bad = certify(q, pair, 1e-8);
  CHECK_FALSE(bad.pass);
  CHECK(bad.residual == doctest::Approx(std::pow(7.0, -2.0 / 3.0)).epsilon(1e-10));

  EigenPair z;
  z.kind = EigenKind::Z;
  z.value = 1.0;
  z.vector = {1.0, 0.0};
  CHECK(certify(identity_tensor(4, 2), z, 0.0).residual == 0.0);
}
