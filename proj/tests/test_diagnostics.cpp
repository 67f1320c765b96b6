#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "cpe/diagnostics.hpp"
#include "cpe/initial.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cpe;

namespace {

Params<double> params_1d() {
  Params<double> pr;
  pr.dim_h = 1;
  pr.gamma = 2;
  return pr;
}

State<double> flat_state(GridPtr<double> grid, double z_value, double v_value) {
  return oracle::make_state(grid, params_1d(), [=](double) { return z_value; },
                            [=](double, double) { return v_value; });
}

}  // namespace

TEST_CASE("weighted volume of pinned surfaces") {
  auto grid = make_grid(1, 64, 1, 16, 1.0);
  CHECK(std::abs(mass(equilibrium_state(grid, params_1d())) - 1.0) <= 1e-15);
  CHECK(std::abs(mass(flat_state(grid, std::sqrt(2.0), 0.0)) - 2.0) <= 1e-14);
  const State<double> wavy = oracle::make_state(
      grid, params_1d(), [](double x) { return 1 + 0.1 * std::cos(2 * EIGEN_PI * x); },
      [](double, double) { return 0.0; });
  CHECK(std::abs(mass(wavy) - 1.005) <= 1e-14);
}

TEST_CASE("momentum of a uniform stream") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  const Vec2<double> m = momentum(flat_state(grid, 1.0, 0.8));
  CHECK(std::abs(m[0] - 0.4) <= 1e-15);
  CHECK(m[1] == 0.0);
}

TEST_CASE("energy of simple states") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  const double c = 0.6;
  CHECK(std::abs(basic_energy(flat_state(grid, 1.0, c)) - c * c / 4) <= 1e-15);

  const double d0 = 1e-2;
  const double e = basic_energy(flat_state(grid, 1 + d0, 0.0));
  const double closed = (1.0 / 3.0) * ((std::pow(1 + d0, 3) - 1) -
                                       1.5 * (std::pow(1 + d0, 2) - 1));
  CHECK(oracle::rel_err(e, closed) <= 1e-13);
  CHECK(std::abs(e - d0 * d0 / 2) <= 0.02 * (d0 * d0 / 2));
}

TEST_CASE("dissipation of a plane shear and of a vertical profile") {
  {
    auto grid = make_grid(1, 64, 1, 16, 1.0);
    Params<double> pr = params_1d();
    pr.lambda = 0.0;
    const State<double> st = oracle::make_state(
        grid, pr, [](double) { return 1.0; },
        [](double x, double) { return std::sin(2 * EIGEN_PI * x); });
    CHECK(oracle::rel_err(basic_dissipation(st), 4 * EIGEN_PI * EIGEN_PI) <= 1e-12);
  }
  {
    auto grid = make_grid(1, 8, 1, 64, 1.0);
    Params<double> pr = params_1d();
    pr.lambda = 0.0;
    const State<double> st = oracle::make_state(
        grid, pr, [](double) { return 1.0; },
        [](double, double z) { return std::cos(EIGEN_PI * z); });
    CHECK(oracle::rel_err(basic_dissipation(st), EIGEN_PI * EIGEN_PI / 2) <= 2e-2);
  }
}

TEST_CASE("norm bundle scales quadratically with the perturbation") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  auto bundle = [&](double eps) {
    const State<double> st = perturbed_ic(grid, params_1d(), eps, {}, {}, 1);
    const ArrayXX<double> W = vertical_velocity(st);
    const ArrayX<double> zt = surface_tendency(st);
    const Velocity<double> vt = velocity_tendency(st, W);
    return total_energy(st, vt, zt);
  };
  const double ratio = bundle(2e-3) / bundle(1e-3);
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);
}

TEST_CASE("norm bundle dominates the surface deviation") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const State<double> st = perturbed_ic(grid, params_1d(), 0.05, {}, {}, seed);
    const ArrayXX<double> W = vertical_velocity(st);
    const ArrayX<double> zt = surface_tendency(st);
    const Velocity<double> vt = velocity_tendency(st, W);
    const double dev = (st.Z - 1.0).square().sum() / grid->nh;
    CHECK(total_energy(st, vt, zt) >= dev);
  }
}

TEST_CASE("dissipation bundle dominates the surface gradient") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const State<double> st = perturbed_ic(grid, params_1d(), 0.05, {}, {}, seed);
    const ArrayXX<double> W = vertical_velocity(st);
    const Velocity<double> vt = velocity_tendency(st, W);
    const ArrayX<double> gx = horiz_deriv(*grid, ArrayX<double>(st.Z), 0);
    CHECK(relative_dissipation(st, vt) >= gx.square().sum() / grid->nh);
  }
}

TEST_CASE("corrected energy carries exactly one velocity-odd term") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  const State<double> st = perturbed_ic(grid, params_1d(), 0.05, {}, {}, 3);
  const Grid<double>& gr = *grid;
  const Params<double>& pr = st.params;
  const ArrayXX<double> W = vertical_velocity(st);
  const ArrayX<double> zt = surface_tendency(st);
  const Velocity<double> vt = velocity_tendency(st, W);

  State<double> flipped = st;
  flipped.v[0] = -st.v[0];
  Velocity<double> vt2 = vt;
  vt2[0] = -vt[0];
  const ArrayX<double> zt2 = -zt;

  const double e1 = relative_energy(st, vt, zt);
  const double e2 = relative_energy(flipped, vt2, zt2);

  const double c = pr.mu / (8 * pr.g);
  const ArrayXX<double> div = horiz_deriv(gr, st.v[0], 0);
  const ArrayX<double> dev = st.Z.pow(pr.alpha() + 1) - 1;
  double cross = 0;
  for (int k = 0; k < gr.nz; ++k)
    cross += gr.zpow_alpha[k] * gr.dz * (dev * div.col(k)).sum() / gr.nh;
  cross *= -c * pr.g / (pr.alpha() + 1);

  CHECK(std::abs((e1 - e2) / 2 - cross) <= 1e-12 * std::max(1.0, std::abs(cross)));
}

TEST_CASE("diagnostic record agrees with the standalone functionals") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  const State<double> st = perturbed_ic(grid, params_1d(), 0.05, {}, {}, 2);
  const DiagRecord<double> r = collect_diagnostics(st);
  CHECK(r.mass == doctest::Approx(mass(st)).epsilon(1e-14));
  CHECK(r.mom_x == doctest::Approx(momentum(st)[0]).epsilon(1e-14));
  CHECK(r.e_basic == doctest::Approx(basic_energy(st)).epsilon(1e-14));
  CHECK(r.d_basic == doctest::Approx(basic_dissipation(st)).epsilon(1e-14));
  CHECK(r.delta_x == doctest::Approx(delta(st)[0]).epsilon(1e-14));
  CHECK(r.zmin == st.Z.minCoeff());
  CHECK(r.zmax == st.Z.maxCoeff());
  CHECK(r.mass > 0.0);
  for (double x : {r.t, r.mass, r.mom_x, r.mom_y, r.e_basic, r.d_basic, r.e_total,
                   r.e_rel, r.d_rel, r.delta_x, r.delta_y, r.zmin, r.zmax})
    CHECK(std::isfinite(x));
}

TEST_CASE("decay-rate fit on synthetic series") {
  std::vector<double> t, y;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.1 * i);
    y.push_back(std::exp(-2.0 * 0.1 * i));
  }
  DecayFit<double> fit = fit_decay_rate(t, y);
  CHECK(std::abs(fit.rate - 2.0) <= 1e-10);
  CHECK(fit.r2 >= 1.0 - 1e-12);

  std::vector<double> flat(t.size(), 3.5);
  fit = fit_decay_rate(t, flat);
  CHECK(std::abs(fit.rate) <= 1e-14);
  CHECK(fit.r2 == 1.0);

  std::vector<double> tm, ym;
  for (int i = 0; i <= 200; ++i) {
    const double s = 0.05 * i;
    tm.push_back(s);
    ym.push_back(5 * std::exp(-0.7 * s) * (1 + 0.01 * std::sin(s)));
  }
  fit = fit_decay_rate(tm, ym);
  CHECK(fit.rate >= 0.68);
  CHECK(fit.rate <= 0.72);
}

TEST_CASE("decay-rate fit rejects degenerate input") {
  CHECK_THROWS_AS(fit_decay_rate<double>({0.0, 1.0}, {1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate<double>({0.0, 1.0, 2.0}, {1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate<double>({0.0, 1.0, 2.0, 3.0}, {1.0, -1.0, -1.0, -1.0}),
                  std::invalid_argument);
}
