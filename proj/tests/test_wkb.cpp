#include <doctest.h>

#include <cmath>

#include "sykm/wkb.hpp"

using namespace sykm;

TEST_CASE("trapped energies: plus-side closed form") {
  WallPotential p{WallSide::Plus, 1.0, 1.0, 5.0, 10.0};
  auto e = wkb_trapped_energies(p, 1);
  double expect = std::cbrt(0.5) * std::pow(0.75 * M_PI, 2.0 / 3.0);
  CHECK(e[0] == doctest::Approx(expect).epsilon(1e-13)); // ~1.4054
  // ratio law cancels the prefactor
  int nstar = wkb_trapped_count(p);
  REQUIRE(nstar >= 3);
  auto es = wkb_trapped_energies(p, 3);
  CHECK(es[1] / es[0] == doctest::Approx(std::pow(3.0, 2.0 / 3.0)).epsilon(1e-13));
  CHECK(es[2] / es[0] == doctest::Approx(std::pow(5.0, 2.0 / 3.0)).epsilon(1e-13));
  // monotone, below the trapping edge
  CHECK(es[0] < es[1]);
  CHECK(es[1] < es[2]);
  CHECK(es[nstar - 1] <= p.h * p.T_h + 1e-12);
  CHECK_THROWS_AS((void)wkb_trapped_energies(p, nstar + 1), Error);
}

TEST_CASE("trapped count is independent of the bulk depth on the plus side") {
  WallPotential p{WallSide::Plus, 1.0, 1.0, 3.0, 5.0};
  WallPotential q = p;
  q.T = 50.0;
  CHECK(wkb_trapped_count(p) == wkb_trapped_count(q));
}

TEST_CASE("minus-side trapped energies reduce to the plus form as T -> 0") {
  WallPotential m{WallSide::Minus, 1.0, 1.0, 3.0, 1e-12};
  WallPotential pl{WallSide::Plus, 1.0, 1.0, 3.0, 10.0};
  auto em = wkb_trapped_energies(m, 2);
  auto ep = wkb_trapped_energies(pl, 2);
  CHECK(em[0] == doctest::Approx(-m.h * m.T_h + ep[0]).epsilon(1e-8));
  CHECK(em[1] == doctest::Approx(-m.h * m.T_h + ep[1]).epsilon(1e-8));
}

TEST_CASE("extended energies: box limit and the 2 h T_h offset") {
  WallPotential p{WallSide::Plus, 1.0, 1e-14, 1e-14, 10.0};
  auto e = wkb_extended_energies(p, 3);
  for (int n = 1; n <= 3; ++n)
    CHECK(e[n - 1] == doctest::Approx(n * n * M_PI * M_PI / 200.0).epsilon(1e-10));

  WallPotential pp{WallSide::Plus, 1.0, 0.05, 2.0, 10.0};
  WallPotential mm{WallSide::Minus, 1.0, 0.05, 2.0, 10.0};
  auto ep = wkb_extended_energies(pp, 2);
  auto em = wkb_extended_energies(mm, 2);
  CHECK(ep[0] - em[0] == doctest::Approx(2 * 0.05 * 2.0).epsilon(1e-12));

  // sigma=1, T=10, n=3, h T_h = 0.1 -> ~0.5441
  WallPotential q{WallSide::Plus, 1.0, 0.05, 2.0, 10.0};
  CHECK(wkb_extended_energies(q, 3)[2] ==
        doctest::Approx(0.1 + std::pow(0.3 * M_PI, 2) / 2.0).epsilon(1e-12));
}

TEST_CASE("oracle: box spectrum at 2000 points within 0.5%") {
  WallPotential p{WallSide::Plus, 1.0, 1e-14, 1e-14, 7.0};
  auto ev = grid_diagonalize(p, 2000, 3);
  for (int n = 1; n <= 3; ++n) {
    double exact = n * n * M_PI * M_PI / (2.0 * p.box_length() * p.box_length());
    CHECK(std::abs(ev[n - 1] - exact) / exact < 0.005);
  }
}

TEST_CASE("oracle: deep triangular well reproduces the Airy ground state") {
  // E_1 -> 2.3381 (h^2/2sigma)^{1/3} when the strip is deep
  WallPotential p{WallSide::Plus, 1.0, 1.0, 30.0, 5.0};
  auto ev = grid_diagonalize(p, 4000, 1);
  double airy = 2.33810741 * std::cbrt(p.h * p.h / (2.0 * p.sigma));
  CHECK(std::abs(ev[0] - airy) / airy < 0.01);
}

TEST_CASE("oracle: eigenvalues non-decreasing and monotone in the field") {
  WallPotential p{WallSide::Plus, 1.0, 0.5, 2.0, 6.0};
  auto ev = grid_diagonalize(p, 900, 12);
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i] >= ev[i - 1] - 1e-12);
  WallPotential q = p;
  q.h = 1.0;
  auto ew = grid_diagonalize(q, 900, 12);
  for (std::size_t i = 0; i < ew.size(); ++i) CHECK(ew[i] >= ev[i] - 1e-10);
  CHECK_THROWS_AS((void)grid_diagonalize(p, 100), Error);
}

TEST_CASE("wall free energy: leading terms and N scalings") {
  WallPotential p{WallSide::Plus, 1.3, 0.7, 2.0, 6.0};
  double x = 1.4;
  WallFreeEnergy f1 = wall_free_energy_wkb(p, x, 1);
  WallFreeEnergy f8 = wall_free_energy_wkb(p, x, 8);
  CHECK(f1.leading == doctest::Approx(1.3 * x).epsilon(1e-13));
  CHECK(f8.leading == doctest::Approx(8 * 1.3 * x).epsilon(1e-13));
  // subleading trapped term scales as N^{1/3}
  CHECK(f8.subleading / f1.subleading == doctest::Approx(2.0).epsilon(1e-10));

  WallPotential m{WallSide::Minus, 1.3, 0.7, 2.0, 6.0};
  WallFreeEnergy g = wall_free_energy_wkb(m, x, 5);
  CHECK(g.leading == doctest::Approx(5 * (1.3 - 0.7 * 2.0) * x).epsilon(1e-13));

  // oracle-corrected value tracks the WKB one at the few-percent level
  WallFreeEnergy fo = wall_free_energy_wkb(p, x, 1, 3000);
  CHECK(std::abs(fo.oracle_corrected - (f1.leading + f1.subleading)) <
        0.35 * f1.subleading + 1e-12);
}

TEST_CASE("wkb vs oracle: scaling law of the trapped branch") {
  // deep-well regime so the trapped branch is long
  WallPotential p{WallSide::Plus, 1.0, 1.0, 12.0, 4.0};
  int nstar = wkb_trapped_count(p);
  REQUIRE(nstar >= 10);
  auto oracle = grid_diagonalize(p, 4000, nstar + 6);
  // The (2n-1)^{2/3} law referenced to n = 1 inherits the known ~24% offset
  // between the hard-wall (n - 1/4) quantization and the (n - 1/2) one used
  // here; pin that mismatch, then check the scaling against a reference
  // inside the scaling regime.
  double r21 = oracle[1] / oracle[0];
  CHECK(std::abs(r21 - std::pow(3.0, 2.0 / 3.0)) / std::pow(3.0, 2.0 / 3.0) ==
        doctest::Approx(0.16).epsilon(0.25));
  const int ref = 4;
  for (int n = ref; n <= nstar / 2 + ref; ++n) {
    double ratio = oracle[n - 1] / oracle[ref - 1];
    double law = std::pow((2.0 * n - 1.0) / (2.0 * ref - 1.0), 2.0 / 3.0);
    CHECK(std::abs(ratio - law) / law < 0.05);
  }
}

TEST_CASE("wkb vs oracle: extended branch within 2% in the thin-strip regime") {
  // the closed form assumes T_h << T (the strip width stays fixed while the
  // bulk depth grows) and E >> h T_h
  WallPotential q{WallSide::Plus, 1.0, 1.0, 0.1, 20.0};
  int qstar = wkb_trapped_count(q);
  auto qo = grid_diagonalize(q, 4000, qstar + 16);
  auto qe = wkb_extended_energies(q, 16);
  int checked = 0;
  for (int n = 1; n <= 16; ++n) {
    double eo = qo[qstar + n - 1];
    if (eo < 5.0 * q.h * q.T_h) continue;
    CHECK(std::abs(qe[n - 1] - eo) / eo < 0.02);
    ++checked;
  }
  CHECK(checked >= 6);
}
