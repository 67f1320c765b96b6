#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "cpe/physmap.hpp"

#include "cpe/diagnostics.hpp"
#include "cpe/dynamics.hpp"
#include "cpe/initial.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cpe;

namespace {

Params<double> params(double gamma, double g) {
  Params<double> pr;
  pr.dim_h = 1;
  pr.gamma = gamma;
  pr.g = g;
  return pr;
}

PhysSnapshot<double> reconstruct(const State<double>& st, int nz_phys = 0) {
  const ArrayXX<double> W = vertical_velocity(st);
  const ArrayX<double> zt = surface_tendency(st);
  return to_physical(st, W, zt, nz_phys);
}

}  // namespace

TEST_CASE("hydrostatic density profile values") {
  bool oor = false;
  const Params<double> linear = params(2.0, 2.0);
  CHECK(equilibrium_density_profile(0.0, linear, &oor) == 1.0);
  CHECK_FALSE(oor);
  CHECK(equilibrium_density_profile(1.0, linear) == 0.0);
  CHECK(oracle::rel_err(equilibrium_density_profile(0.25, linear), 0.75) <= 1e-15);

  CHECK(oracle::rel_err(equilibrium_density_profile(0.5, params(3.0, 3.0)), 1.0) <=
        1e-15);
  CHECK(oracle::rel_err(equilibrium_density_profile(0.5, params(3.0, 1.5)),
                        std::sqrt(0.5)) <= 1e-15);

  CHECK(equilibrium_density_profile(1.5, linear, &oor) == 0.0);
  CHECK(oor);
}

TEST_CASE("physical reconstruction of the rest state") {
  auto grid = make_grid(1, 16, 1, 32, 1.0);
  const State<double> st = equilibrium_state(grid, params(2.0, 2.0));
  const PhysSnapshot<double> snap = reconstruct(st);
  for (int k = 0; k < grid->nz; ++k) {
    CHECK(oracle::linf(ArrayX<double>(snap.z_phys.col(k) - (1 - grid->z[k]))) <= 1e-15);
    CHECK(oracle::linf(ArrayX<double>(snap.rho.col(k) - grid->z[k])) <= 1e-15);
    CHECK(snap.w.col(k).abs().maxCoeff() == 0.0);
  }
  CHECK(snap.clamp_warnings == 0);
}

TEST_CASE("node images invert back to the reference levels") {
  auto grid = make_grid(1, 32, 1, 16, 1.0);
  const State<double> st = perturbed_ic(grid, params(2.0, 1.0), 0.05, {}, {}, 7);
  const PhysSnapshot<double> snap = reconstruct(st);
  double worst = 0;
  for (int k = 0; k < grid->nz; ++k)
    for (int x = 0; x < grid->nh; ++x)
      worst = std::max(worst,
                       std::abs(1 - snap.z_phys(x, k) / st.Z[x] - grid->z[k]));
  CHECK(worst <= 1e-14);
  CHECK(snap.clamp_warnings == 0);
  for (int k = 0; k < grid->nz; ++k)
    CHECK((snap.v[0].col(k) == st.v[0].col(k)).all());
}

TEST_CASE("resampled density is monotone with pinned endpoints") {
  auto grid = make_grid(1, 8, 1, 32, 1.0);
  const State<double> st = equilibrium_state(grid, params(2.0, 2.0));
  const int m = 64;
  const PhysSnapshot<double> snap = reconstruct(st, m);
  for (int x = 0; x < grid->nh; ++x) {
    for (int j = 0; j + 1 < m; ++j)
      CHECK(snap.rho_uniform(x, j) >= snap.rho_uniform(x, j + 1) - 1e-15);
    CHECK(std::abs(snap.rho_uniform(x, 0) - 1.0) <= 0.02);
    CHECK(snap.rho_uniform(x, m - 1) <= 0.02);
    CHECK(snap.z_uniform(x, 0) < snap.z_uniform(x, m - 1));
  }
}

TEST_CASE("reconstructed vertical motion vanishes at the ground") {
  auto grid = make_grid(1, 64, 1, 32, 1.0);
  const State<double> st = perturbed_ic(grid, params(2.0, 1.0), 0.05, {}, {}, 3);
  const PhysSnapshot<double> snap = reconstruct(st);
  const double wmax = snap.w.abs().maxCoeff();
  CHECK(wmax > 0.0);
  CHECK(snap.w.col(grid->nz - 1).abs().maxCoeff() <= 10 * grid->dz * wmax + 1e-14);
}

TEST_CASE("near-surface density follows the square-root law") {
  auto grid = make_grid(1, 8, 1, 32, 0.5);
  const State<double> st = equilibrium_state(grid, params(3.0, 1.5));
  const PhysSnapshot<double> snap = reconstruct(st);
  std::vector<double> logd, rho;
  for (int k = 0; k < grid->nz; ++k)
    if (grid->z[k] < 0.1) {
      logd.push_back(std::log(st.Z[0] - snap.z_phys(0, k)));
      rho.push_back(snap.rho(0, k));
    }
  REQUIRE(logd.size() >= 3);
  const DecayFit<double> fit = fit_decay_rate(logd, rho);
  CHECK(std::abs(-fit.rate - 0.5) <= 1e-12);
  CHECK(fit.r2 >= 1.0 - 1e-12);
}

TEST_CASE("reconstruction rejects a surface outside the validity band") {
  auto grid = make_grid(1, 16, 1, 8, 1.0);
  State<double> st = equilibrium_state(grid, params(2.0, 1.0));
  st.Z.setConstant(2.1);
  const ArrayXX<double> W = ArrayXX<double>::Zero(grid->nh, grid->nz);
  const ArrayX<double> zt = ArrayX<double>::Zero(grid->nh);
  CHECK_THROWS_AS(to_physical(st, W, zt), ValidityError);
}
