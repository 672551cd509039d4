#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fpbh;
using Catch::Approx;

namespace {

HarvesterModel cantilever_for(const HarvesterModel& fpb, std::size_t modes = 4) {
  CantileverGeometry g{test::kLength, test::kLength, 0.0, 0.085};
  return make_cantilever_model(fpb.laminate(), g, Damping::per_mode({0.03, 0.03, 0.05, 0.05, 0.07, 0.07}), modes,
                               fpb.circuit().load_resistance);
}

}  // namespace

TEST_CASE("golden-section search finds a smooth maximum") {
  const auto [x, f] = golden_section_max([](double t) { return -std::pow(t - 0.3, 2) + 2.0; }, -1.0, 2.0, 1e-12);
  CHECK(x == Approx(0.3).margin(1e-6));
  CHECK(f == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("strain field is -z times the curvature") {
  const auto m = test::fpb_model(0.6);
  const auto p = impulse_peak_estimates(m, 1.0);
  const CurvatureSnapshot snap(m.basis(), p.modal);
  const auto f = strain_field(m, snap, StrainGrid{101, 11});
  const double L = m.length(), h = 1e-4 * L;
  for (std::size_t ix : {std::size_t{7}, std::size_t{50}, std::size_t{93}}) {
    const double x = f.xi[ix] * L;
    const double fd = (snap.deflection_at(x + h) - 2 * snap.deflection_at(x) + snap.deflection_at(x - h)) / (h * h);
    for (std::size_t iz : {std::size_t{0}, std::size_t{5}, f.z.size() - 1}) CHECK(f.at(iz, ix) == Approx(-f.z[iz] * fd).epsilon(1e-6));
  }
  CHECK(f.z.size() == 11 * m.laminate().layers().size());
  CHECK(f.z.front() == Approx(m.laminate().interfaces().front()));
  CHECK(f.z.back() == Approx(m.laminate().interfaces().back()));
}

TEST_CASE("strain vanishes at the pinned supports and on the neutral axis") {
  const auto m = test::fpb_model();
  const CurvatureSnapshot snap(m.basis(), impulse_peak_estimates(m, 1.0).modal);
  const double top = m.laminate().interfaces().back();
  const double mid = std::abs(strain_at(m, snap, 0.5, top));
  CHECK(std::abs(strain_at(m, snap, 0.0, top)) < 1e-10 * mid);
  CHECK(std::abs(strain_at(m, snap, 1.0, top)) < 1e-10 * mid);
  CHECK(strain_at(m, snap, 0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(strain_at(m, snap, 1.5, 0.0), ValidationError);
  CHECK_THROWS_AS(strain_at(m, snap, 0.5, 2 * top), ValidationError);
}

TEST_CASE("snapshot phase puts the peak curvature on the real axis") {
  const auto m = test::fpb_model();
  const auto p = impulse_peak_estimates(m, 1.0);
  const CurvatureSnapshot snap(m.basis(), p.modal);
  const double z = std::abs(m.laminate().piezo_outer_surface());
  CHECK(z * std::abs(snap.curvature_at(p.strain_at)) == Approx(p.strain).epsilon(1e-12));
}

TEST_CASE("active volume fraction on analytic fields") {
  const auto m = test::fpb_model(0.88, 1.0, 1);
  // Mode-1 shape only: |eps| ~ |z| sin(pi x / L); the piezo occupies a single thin
  // layer so |z| varies little and the x-fraction dominates.
  const CurvatureSnapshot snap(m.basis(), std::vector<double>{1.0});
  StrainGrid g{2000, 201, GridKind::cells};
  const auto f = strain_field(m, snap, g);
  const auto [zb, zc] = m.laminate().layer_bounds(m.laminate().piezo_indices()[0]);
  // Oracle: fraction of (x, z) with |z| sin(pi x/L) >= t zc, by double quadrature.
  const double t = 0.4;
  const double oracle = test::simpson(
                            [&](double z) {
                              const double s = t * zc / z;
                              return s >= 1.0 ? 0.0 : 1.0 - 2.0 * std::asin(s) / kPi;
                            },
                            zb, zc, 4000) /
                        (zc - zb);
  CHECK(active_volume_fraction(f, m.laminate(), 0.0, m.length(), t) == Approx(oracle).margin(2e-3));
  CHECK(active_volume_fraction(f, m.laminate(), 0.0, m.length(), 1e-9) == Approx(1.0));
  CHECK_THROWS_AS(active_volume_fraction(f, m.laminate(), 0.0, m.length(), 0.0), ValidationError);
}

TEST_CASE("single-mode optimal load has the closed form") {
  const auto m = test::fpb_model(0.88, 0.83, 1);
  const auto& md = m.basis().mode(1);
  const double B = md.lambda * md.gamma / (2 * md.zeta * md.omega);
  const double Cw = m.effective_capacitance() * md.omega;
  const auto c = power_vs_load(m);
  CHECK(c.optimal_load == Approx(1.0 / std::hypot(B, Cw)).epsilon(1e-5));
  for (const auto& p : c.points) CHECK(p.power <= c.peak_power * (1 + 1e-12));
  CHECK(c.points.size() == 61);
}

TEST_CASE("power curve has a single interior maximum") {
  const auto c = power_vs_load(test::fpb_model());
  int changes = 0;
  for (std::size_t i = 2; i < c.points.size(); ++i) {
    const double d0 = c.points[i - 1].power - c.points[i - 2].power;
    const double d1 = c.points[i].power - c.points[i - 1].power;
    if ((d0 > 0) != (d1 > 0)) ++changes;
  }
  CHECK(changes <= 1);
  CHECK(c.optimal_load > c.points.front().load);
  CHECK(c.optimal_load < c.points.back().load);
  for (const auto& p : c.points) CHECK(p.power == Approx(p.voltage * p.current).epsilon(1e-13));
}

TEST_CASE("load grid validation") {
  CHECK_THROWS_AS(power_vs_load(test::fpb_model(), LoadGrid{1e3, 1e5, 61}), ValidationError);
  CHECK_THROWS_AS(power_vs_load(test::fpb_model(), LoadGrid{1e2, 1e8, 2}), ValidationError);
}

TEST_CASE("lambda and FoM identities") {
  const auto pm = lambda_and_fom(test::fpb_model(0.44));
  CHECK(pm.fom * pm.fom == Approx(pm.lambda * pm.open_circuit_voltage).epsilon(1e-12));
  CHECK(pm.lambda == Approx(pm.open_circuit_voltage / pm.max_strain).epsilon(1e-14));
  CHECK(pm.max_stress == Approx(24.8e9 * pm.max_strain).epsilon(1e-14));
  CHECK(pm.peak_power > 0.0);
}

TEST_CASE("kappa sweep keeps the beam and only moves the loads") {
  const auto m = test::fpb_model();
  const auto k = with_kappa(m, 0.44);
  CHECK(k.basis().mode(1).omega == m.basis().mode(1).omega);
  CHECK(k.basis().mode(1).lambda == m.basis().mode(1).lambda);
  CHECK(std::get<FpbGeometry>(k.geometry()).kappa() == Approx(0.44));
  const auto s = sweep_kappa(m, {0.2, 0.5, 0.8}, MetricsOptions{{}, false, {}});
  REQUIRE(s.size() == 3);
  CHECK(best_fom(s) < 3);
  CHECK_THROWS_AS(sweep_kappa(m, {1.0}), ValidationError);
}

TEST_CASE("theta sweep reports power per piezo volume") {
  const auto m = test::fpb_model();
  const auto d = Damping::uniform(0.03);
  const auto s = sweep_theta(m, d, {0.5, 0.8});
  for (const auto& p : s) {
    const auto mt = with_theta(m, p.theta, d);
    CHECK(p.power_density == Approx(p.peak_power / (m.laminate().width() * m.laminate().piezo_thickness() *
                                                    p.theta * m.length()))
                                 .epsilon(1e-12));
  }
}

TEST_CASE("cantilever comparison needs a shared laminate") {
  const auto fpb = test::fpb_model();
  const auto cant = cantilever_for(fpb);
  const auto s = compare_cantilever(fpb, cant, {0.3, 0.6, 0.9});
  REQUIRE(s.rows.size() == 3);
  for (const auto& r : s.rows) {
    CHECK(r.fpb.lambda > 0.0);
    CHECK(r.cantilever.lambda > 0.0);
  }
  const auto other = cantilever_for(test::fpb_model(0.88, 0.83, 4, 29e3, test::unimorph(0.3e-3)));
  CHECK_THROWS_AS(compare_cantilever(fpb, other, {0.5}), ValidationError);
  CHECK_THROWS_AS(compare_cantilever(cant, fpb, {0.5}), ValidationError);
}

TEST_CASE("cantilever tip load: quasi-static strain is largest at the clamp") {
  const auto cant = cantilever_for(test::fpb_model(), 1);
  const auto p = impulse_peak_estimates(cant, 1.0);
  CHECK(p.strain_at == Approx(0.0).margin(1e-12));
  CHECK(p.deflection_at == Approx(test::kLength));
}

TEST_CASE("boundary simplification ratio is linear in voltage") {
  const auto m = test::fpb_model();
  CHECK(bc_simplification_ratio(m, 0.0) == 0.0);
  CHECK(bc_simplification_ratio(m, 20.0) == Approx(2 * bc_simplification_ratio(m, 10.0)));
  CHECK_THROWS_AS(bc_simplification_ratio(m, -1.0), ValidationError);
}
