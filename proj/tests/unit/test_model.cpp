#include "doctest.h"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "gyw/covariance.hpp"
#include "gyw/evaluation.hpp"
#include "gyw/model.hpp"
#include "gyw/random.hpp"
#include "gyw/weights.hpp"

using namespace gyw;

namespace {

CoefficientSet<double> constant_coeffs(Index p, double l0, double l1, double l2) {
  CoefficientSet<double> c = CoefficientSet<double>::zeros(p);
  c.lambda0.setConstant(l0);
  c.lambda1.setConstant(l1);
  c.lambda2.setConstant(l2);
  return c;
}

ModelSpec<double> drawn_spec(Index p, std::uint64_t seed) {
  return draw_stable_spec(scenario1_weights<double>(p), ExperimentConfig{}, seed).spec;
}

double gelfand_radius(const Eigen::MatrixXd& a) {
  // Spectral radius as the limit of ||A^k||^(1/k), squared repeatedly.
  Eigen::MatrixXd m = a;
  double log_scale = 0.0;
  int exponent = 1;
  for (int k = 0; k < 40; ++k) {
    const double norm = m.norm();
    m /= norm;
    log_scale = 2.0 * (log_scale + std::log(norm));
    m = (m * m).eval();
    exponent *= 2;
    if (exponent > (1 << 28)) break;
  }
  return std::exp((log_scale + std::log(m.norm())) / exponent);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("decoupled AR(1) transition") {
  const auto w = scenario1_weights<double>(9);
  const auto tf = build_transition(w, constant_coeffs(9, 0.0, 0.5, 0.0));
  CHECK((tf.a_matrix - 0.5 * Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(tf.spectral_radius == doctest::Approx(0.5));
  const auto st = is_stationary(tf);
  CHECK(st.stationary);
  CHECK(st.margin == doctest::Approx(0.5));
}

TEST_CASE("unit root is not stationary") {
  TransitionForm<double> tf;
  tf.a_matrix = Eigen::MatrixXd::Identity(2, 2);
  tf.spectral_radius = 1.0;
  const auto st = is_stationary(tf);
  CHECK_FALSE(st.stationary);
  CHECK(st.margin == doctest::Approx(0.0));
}

TEST_CASE("transition matrix matches a direct recomputation") {
  const ModelSpec<double> spec = drawn_spec(25, 11);
  const auto tf = build_transition(spec);
  const Eigen::MatrixXd& w = spec.weights().entries();
  const auto& c = spec.coeffs();
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(25, 25) - c.lambda0.asDiagonal() * w;
  const Eigen::MatrixXd direct =
      s.fullPivLu().solve(Eigen::MatrixXd(c.lambda1.asDiagonal()) + c.lambda2.asDiagonal() * w);
  CHECK((tf.a_matrix - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spectral radius agrees with repeated squaring of A") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto tf = build_transition(drawn_spec(25, seed));
    CHECK(std::abs(tf.spectral_radius - gelfand_radius(tf.a_matrix)) < 1e-8);
  }
}

TEST_CASE("singular spatial filter is rejected") {
  // Two locations pointing at each other with lambda0 = 1 give det(S) = 0.
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 1, 0;
  const WeightMatrix<double> weights(w);
  CHECK_THROWS_WITH_AS(ModelSpec<double>(weights, constant_coeffs(2, 1.0, 0.0, 0.0), Eigen::VectorXd::Ones(2)),
                       doctest::Contains("S(lambda0)"), NumericalError);
}

TEST_CASE("zero noise simulation stays at zero") {
  const ModelSpec<double> base = drawn_spec(9, 5);
  const ModelSpec<double> quiet(base.weights(), base.coeffs(), Eigen::VectorXd::Zero(9));
  const auto y = simulate(quiet, 50, 3);
  CHECK(y.values.isZero(0.0));
}

TEST_CASE("scalar AR(1) long-run variance") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1, 1);
  const ModelSpec<double> spec(WeightMatrix<double>(w), constant_coeffs(1, 0.0, 0.5, 0.0), Eigen::VectorXd::Ones(1));
  const auto y = simulate(spec, 50000, 17);
  const double var = y.values.squaredNorm() / 50000.0;
  CHECK(var == doctest::Approx(4.0 / 3.0).epsilon(0.05));
}

TEST_CASE("simulation is deterministic in the seed") {
  const ModelSpec<double> spec = drawn_spec(25, 8);
  const auto a = simulate(spec, 100, 99);
  const auto b = simulate(spec, 100, 99);
  const auto c = simulate(spec, 100, 100);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("explosive specs are refused unless allowed") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1, 1);
  const ModelSpec<double> spec(WeightMatrix<double>(w), constant_coeffs(1, 0.0, 1.1, 0.0), Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(simulate(spec, 10, 1), NumericalError);
  SimulationOptions opts;
  opts.allow_explosive = true;
  opts.burn_in = 0;
  CHECK(simulate(spec, 10, 1, opts).n() == 10);
}

TEST_CASE("long simulation has bounded converging covariance") {
  const ModelSpec<double> spec = drawn_spec(9, 21);
  const auto pop = population_covariances(spec);
  const auto y = simulate(spec, 20000, 4);
  CHECK(y.values.allFinite());
  const auto cov = sample_autocov(y);
  CHECK((cov.sigma0_hat - pop.sigma0).norm() / pop.sigma0.norm() < 0.05);
}

TEST_CASE("population covariances of the decoupled AR(1)") {
  const auto w = scenario1_weights<double>(9);
  const ModelSpec<double> spec(w, constant_coeffs(9, 0.0, 0.5, 0.0), Eigen::VectorXd::Ones(9));
  const auto pop = population_covariances(spec);
  CHECK((pop.sigma0 - (4.0 / 3.0) * Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pop.sigma1 - (2.0 / 3.0) * Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);

  const ModelSpec<double> quiet(w, constant_coeffs(9, 0.2, 0.3, 0.1), Eigen::VectorXd::Zero(9));
  const auto zero = population_covariances(quiet);
  CHECK(zero.sigma0.isZero(0.0));
  CHECK(zero.sigma1.isZero(0.0));
}

TEST_CASE("Lyapunov solution matches the Kronecker vec form") {
  // p = 4 with a hand-built weight matrix keeps (I - A kron A) at 16 x 16.
  Eigen::MatrixXd w(4, 4);
  w << 0, 0.5, 0.5, 0, 0.3, 0, 0.3, 0.4, 0, 1, 0, 0, 0.25, 0.25, 0.5, 0;
  Rng rng(12);
  std::uniform_real_distribution<double> coef(-0.4, 0.4);
  std::uniform_real_distribution<double> sd(0.5, 1.5);
  for (int rep = 0; rep < 5; ++rep) {
    CoefficientSet<double> c = CoefficientSet<double>::zeros(4);
    for (int k = 0; k < 3; ++k) {
      for (Index i = 0; i < 4; ++i) c[k](i) = coef(rng);
    }
    Eigen::VectorXd sigma(4);
    for (Index i = 0; i < 4; ++i) sigma(i) = sd(rng);
    const ModelSpec<double> spec(WeightMatrix<double>(w), c, sigma);
    const auto tf = build_transition(spec);
    REQUIRE(tf.spectral_radius < 1.0);
    const Eigen::MatrixXd q = tf.s_inverse * sigma.array().square().matrix().asDiagonal() * tf.s_inverse.transpose();
    const Eigen::MatrixXd kron = Eigen::kroneckerProduct(tf.a_matrix, tf.a_matrix);
    const Eigen::VectorXd vec_q = Eigen::Map<const Eigen::VectorXd>(q.data(), 16);
    const Eigen::VectorXd vec_x = (Eigen::MatrixXd::Identity(16, 16) - kron).fullPivLu().solve(vec_q);
    const Eigen::MatrixXd oracle = Eigen::Map<const Eigen::MatrixXd>(vec_x.data(), 4, 4);
    const auto pop = population_covariances(spec);
    CHECK((pop.sigma0 - oracle).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pop.sigma1 - tf.a_matrix * oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fitted values") {
  const ModelSpec<double> spec = drawn_spec(9, 31);
  const auto y = simulate(spec, 40, 6);
  SUBCASE("zero coefficients") {
    const auto fit = fitted_values(y.values, spec.weights(), CoefficientSet<double>::zeros(9));
    CHECK(fit.fitted.isZero(0.0));
    CHECK(fit.residuals == y.values.rightCols(39));
  }
  SUBCASE("pure lag") {
    const auto fit = fitted_values(y.values, spec.weights(), constant_coeffs(9, 0.0, 1.0, 0.0));
    CHECK(fit.fitted == y.values.leftCols(39));
  }
  SUBCASE("noise-free data has zero residuals") {
    const ModelSpec<double> quiet(spec.weights(), spec.coeffs(), Eigen::VectorXd::Zero(9));
    SimulationOptions opts;
    opts.burn_in = 0;
    const auto clean = simulate(quiet, Index{30}, std::uint64_t{0}, opts,
                                std::optional<Eigen::VectorXd>(Eigen::VectorXd::LinSpaced(9, -1.0, 1.0)));
    const auto fit = fitted_values(clean.values, quiet.weights(), quiet.coeffs());
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forecasts") {
  SUBCASE("A = 0.5 I") {
    TransitionForm<double> tf;
    tf.a_matrix = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd f = forecast(Eigen::VectorXd(Eigen::Vector2d(2, -2)), tf, 2);
    CHECK(f(0, 0) == 1.0);
    CHECK(f(1, 0) == -1.0);
    CHECK(f(0, 1) == 0.5);
    CHECK(f(1, 1) == -0.5);
  }
  SUBCASE("h-step equals iterated one-step") {
    const ModelSpec<double> spec = drawn_spec(25, 41);
    const auto tf = build_transition(spec);
    const Eigen::VectorXd last = simulate(spec, 10, 1).values.col(9);
    const Eigen::MatrixXd f = forecast(last, tf, 8);
    Eigen::VectorXd state = last;
    for (Index h = 0; h < 8; ++h) {
      state = forecast(state, tf, 1).col(0);
      CHECK((f.col(h) - state).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("noise-free continuation") {
    const ModelSpec<double> base = drawn_spec(9, 51);
    const ModelSpec<double> quiet(base.weights(), base.coeffs(), Eigen::VectorXd::Zero(9));
    SimulationOptions opts;
    opts.burn_in = 0;
    const auto path = simulate(quiet, Index{20}, std::uint64_t{0}, opts,
                               std::optional<Eigen::VectorXd>(Eigen::VectorXd::Ones(9)));
    const PanelSeries<double> head(path.values.leftCols(14));
    const Eigen::MatrixXd f = forecast(head, quiet.weights(), quiet.coeffs(), 6);
    CHECK((f - path.values.rightCols(6)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(forecast(Eigen::VectorXd::Zero(2).eval(), TransitionForm<double>{Eigen::MatrixXd::Zero(2, 2), {}, 0.0}, 0),
                  InvalidArgument);
}

TEST_CASE("panel series validation") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 3);
  CHECK(PanelSeries<double>(v).names == std::vector<std::string>{"loc1", "loc2"});
  CHECK_THROWS_AS(PanelSeries<double>(v, {"a"}), InvalidArgument);
  v(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(PanelSeries<double>{v}, DataError);
}

}
