#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "halfspace/spectrum.hpp"
#include "oracle_values.hpp"

using namespace halfspace;

TEST_CASE("G decomposition matches the boundary-value ratio") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> um(0.01, 0.99), ug(-0.9, 3.0), ue(0.05, 3.0);
  for (int i = 0; i < 300; ++i) {
    const double mu = um(rng);
    const PlasmaParameters p = PlasmaParameters::make(ug(rng), ue(rng));
    const GDecomposition d = g_decompose(mu, p);
    const BoundaryValues bv = lambda_boundary(mu, p);
    const cplx ratio = bv.plus / bv.minus;
    CHECK(std::abs(d.G() - ratio) <= 1e-9 * std::abs(ratio));
    CHECK(d.g > 0.0);
  }
  const PlasmaParameters p = PlasmaParameters::make(0.4, 0.7);
  CHECK(std::abs(g_decompose(1e-9, p).G() - 1.0) < 1e-8);
  // logarithmic approach to 1 at the far endpoint
  CHECK(std::abs(g_decompose(1.0 - 1e-7, p).G() - 1.0) < std::abs(g_decompose(1.0 - 1e-3, p).G() - 1.0));
  CHECK_THROWS_AS(g_decompose(1.0 - 1e-12, p), Error);
  CHECK_THROWS_AS(g_decompose(0.0, p), Error);
  CHECK_THROWS_AS(g_decompose(1.0, p), Error);
}

TEST_CASE("classification against the frozen oracle") {
  for (const auto& pt : frozen::points()) {
    const PlasmaParameters p = PlasmaParameters::make(pt.gamma, pt.eps);
    INFO("gamma=" << pt.gamma << " eps=" << pt.eps);
    const SpectrumClassification s = classify(p);
    CHECK(s.n_zeros == 2 * s.kappa);
    if (pt.plasma_zero) {
      CHECK(s.region == Region::D_plus);
      REQUIRE(s.eta0);
      CHECK(std::abs(*s.eta0 - pt.eta0) < 1e-10 * std::abs(pt.eta0));
      CHECK(s.eta0->real() > 0.0);
      CHECK(std::abs(lambda(*s.eta0, p)) <= 1e-10 * std::abs(p.lambda_inf()));
      CHECK(std::abs(lambda(-*s.eta0, p)) <= 1e-10 * std::abs(p.lambda_inf()));
    } else {
      CHECK(s.region == Region::D_minus);
      CHECK_FALSE(s.eta0);
      CHECK(s.n_zeros == 0);
    }
  }
}

TEST_CASE("winding index is stable under grid refinement") {
  for (const auto& [g, e] : {std::pair{0.0, 0.1}, {3.0, 3.0}, {1.0, 0.3}, {2.5, 0.68}}) {
    const PlasmaParameters p = PlasmaParameters::make(g, e);
    SpectrumOptions coarse, fine;
    coarse.initial_samples = 8;
    fine.initial_samples = 512;
    CHECK(winding_index(p, coarse) == winding_index(p, fine));
  }
}

TEST_CASE("argument principle agrees with the index") {
  for (const auto& pt : frozen::points()) {
    const PlasmaParameters p = PlasmaParameters::make(pt.gamma, pt.eps);
    const int kappa = winding_index(p);
    const int n = contour_zero_count(p, default_contour_radius(p));
    INFO("gamma=" << pt.gamma << " eps=" << pt.eps);
    CHECK(n == 2 * kappa);
    CHECK(n % 2 == 0);
  }
  const PlasmaParameters p = PlasmaParameters::make(0.0, 0.1);
  CHECK(contour_zero_count(p, 10.0) == 2);
  CHECK(contour_zero_count(p, 20.0) == 2);
  CHECK_THROWS_AS(contour_zero_count(p, 0.5), Error);
}

TEST_CASE("eta0: Newton and subdivision agree, small circle isolates it") {
  for (const auto& [g, e] : {std::pair{0.0, 0.1}, {2.0, 0.1}, {1.5, 0.5}, {-0.5, 0.1}, {-0.5, 2.0}}) {
    const PlasmaParameters p = PlasmaParameters::make(g, e);
    const ZeroLocation a = locate_eta0_newton(p);
    const ZeroLocation b = locate_eta0_subdivision(p);
    INFO("gamma=" << g << " eps=" << e);
    CHECK(std::abs(a.eta0 - b.eta0) <= 1e-10 * std::abs(a.eta0));
    CHECK(count_zeros_in_disk(p, a.eta0, eta0_check_radius(a.eta0)) == 1);
  }
  // Joukowski map round trip
  for (const cplx z : {cplx(1.5, 0.2), cplx(0.3, -2.0), cplx(1.0001, 1e-5)}) {
    const cplx zeta = zeta_from_z(z);
    CHECK(std::abs(zeta) < 1.0);
    CHECK(std::abs(z_from_zeta(zeta) - z) < 1e-12 * std::abs(z));
  }
}

TEST_CASE("L curve points solve g1 = g2 = 0 and separate the regions") {
  const LCurve lc = l_curve(default_l_curve_grid());
  CHECK(lc.points.size() == 400);
  CHECK(lc.skipped.empty());
  double worst = 0.0;
  for (const auto& pt : lc.points) {
    const GDecomposition d = g_decompose(pt.mu, PlasmaParameters::make(pt.gamma, pt.eps));
    worst = std::max({worst, std::abs(d.g1), std::abs(d.g2)});
  }
  CHECK(worst <= 1e-8);
  CHECK(std::is_sorted(lc.points.begin(), lc.points.end(), [](auto& a, auto& b) { return a.mu < b.mu; }));

  // lambda_c changes sign once on (0, 1); radicands need it negative
  const double root = case_lambda_root();
  CHECK(std::abs(case_lambda_cut(root)) < 1e-12);
  CHECK(case_lambda_cut(root - 0.05) > 0.0);
  CHECK(case_lambda_cut(root + 0.05) < 0.0);
  const LCurve below = l_curve({0.1, 0.5, root - 1e-3, 1.0, -0.1});
  CHECK(below.points.empty());
  CHECK(below.skipped.size() == 5);
}

TEST_CASE("eta0 is refused where there is no plasma zero") {
  // (3, 3) lies in D-: every locator must come back empty-handed
  const PlasmaParameters p = PlasmaParameters::make(3.0, 3.0);
  CHECK(classify(p).kappa == 0);
  CHECK_THROWS_AS(find_eta0(p), Error);
}

TEST_CASE("plasma zero hugging mu = 1 is counted") {
  // G turns once within 1e-5 of the endpoint here. Zero from mpmath, solved in
  // u = log(z - 1) on the closed form and confirmed by the defining integral.
  const PlasmaParameters p = PlasmaParameters::make(3.0, 0.205263);
  const cplx ref(0.999993421441208738, 7.77414938570762302e-06);
  CHECK(winding_index(p) == 1);
  CHECK(contour_zero_count(p, default_contour_radius(p)) == 2);
  const SpectrumClassification s = classify(p);
  REQUIRE(s.eta0);
  CHECK(std::abs(*s.eta0 - ref) < 1e-12);
}
