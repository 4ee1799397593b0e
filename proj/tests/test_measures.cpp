#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ewb/measures.hpp"
#include "test_helpers.hpp"

using namespace ewb;
using namespace ewb::testing;

namespace {

ParticleMeasure two_atom(double w0, double w1) {
  Eigen::VectorXd w(2);
  w << w0, w1;
  return from_atoms({euclid({0, 0}), euclid({1, 0})}, w);
}

}  // namespace

TEST_CASE("from_atoms: normalization and degenerate input") {
  const ParticleMeasure pm = two_atom(1, 1);
  CHECK(pm.log_weights(0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(pm.log_weights(1) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));

  const ParticleMeasure pm2 = two_atom(1, 3);
  const Eigen::VectorXd w = linear_weights(pm2);
  CHECK(w(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(w(1) == doctest::Approx(0.75).epsilon(1e-14));

  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(from_atoms({euclid({0, 0}), euclid({1, 0})}, zeros), DegenerateMeasureError);
}

TEST_CASE("reweight: softmax values and shift invariance") {
  const double beta = 1.0;
  ParticleMeasure pm = two_atom(1, 1);
  Eigen::VectorXd losses(2);
  losses << 0.0, std::log(2.0) / beta;
  const Eigen::VectorXd w = linear_weights(reweight(pm, losses, beta));
  CHECK(w(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(w(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  Eigen::VectorXd constant = Eigen::VectorXd::Constant(2, 17.0);
  const Eigen::VectorXd w2 = linear_weights(reweight(pm, constant, beta));
  CHECK(w2(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w2(1) == doctest::Approx(0.5).epsilon(1e-14));

  // three atoms, losses (0,1,2): frozen softmax value, oracle = direct
  // exponentiation below
  Eigen::VectorXd w3lin(3);
  w3lin << 1, 1, 1;
  ParticleMeasure pm3 =
      from_atoms({euclid({0, 0}), euclid({1, 0}), euclid({0, 1})}, w3lin);
  Eigen::VectorXd l3(3);
  l3 << 0, 1, 2;
  const Eigen::VectorXd w3 = linear_weights(reweight(pm3, l3, 1.0));
  const double z = 1.0 + std::exp(-1.0) + std::exp(-2.0);
  CHECK(w3(0) == doctest::Approx(1.0 / z).epsilon(1e-13));
  CHECK(w3(1) == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-13));
  CHECK(w3(2) == doctest::Approx(std::exp(-2.0) / z).epsilon(1e-13));
  CHECK(w3(0) == doctest::Approx(0.66524095577482189).epsilon(1e-12));
  CHECK(w3(1) == doctest::Approx(0.24472847105479767).epsilon(1e-12));
  CHECK(w3(2) == doctest::Approx(0.090030573170380462).epsilon(1e-12));
}

TEST_CASE("reweight: NaN loss carries the atom index") {
  ParticleMeasure pm = two_atom(1, 1);
  Eigen::VectorXd losses(2);
  losses << 0.0, std::nan("");
  CHECK_THROWS_WITH_AS(reweight(pm, losses, 1.0), "loss is NaN at atom 1", LossEvaluationError);
}

TEST_CASE("reweight composes multiplicatively at constant beta") {
  Rng rng(3);
  Eigen::VectorXd w0(4);
  w0 << 0.1, 0.4, 0.3, 0.2;
  ParticleMeasure pm =
      from_atoms({euclid({0, 0}), euclid({1, 0}), euclid({0, 1}), euclid({1, 1})}, w0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd l1(4), l2(4);
    for (int i = 0; i < 4; ++i) {
      l1(i) = rng.uniform(0, 5);
      l2(i) = rng.uniform(0, 5);
    }
    const double beta = rng.uniform(0.1, 2.0);
    const Eigen::VectorXd two_steps =
        linear_weights(reweight(reweight(pm, l1, beta), l2, beta));
    const Eigen::VectorXd one_step = linear_weights(reweight(pm, l1 + l2, beta));
    CHECK((two_steps - one_step).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("rebase_cumulative matches iterated reweight at constant beta") {
  Rng rng(5);
  ParticleMeasure prior = two_atom(1, 1);
  const double beta = 0.7;
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(2);
  ParticleMeasure iterated = prior;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd l(2);
    l << rng.uniform(0, 2), rng.uniform(0, 2);
    cum += l;
    iterated = reweight(iterated, l, beta);
    const ParticleMeasure rebased = rebase_cumulative(prior, cum, beta);
    CHECK((linear_weights(rebased) - linear_weights(iterated)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // L = 0 leaves the prior untouched
  const ParticleMeasure same = rebase_cumulative(prior, Eigen::VectorXd::Zero(2), beta);
  CHECK((same.log_weights - prior.log_weights).cwiseAbs().maxCoeff() == 0.0);

  // halving the rate with L fixed is just a fresh reweight of the prior
  const ParticleMeasure halved = rebase_cumulative(prior, cum, beta / 2);
  const ParticleMeasure direct = reweight(prior, cum, beta / 2);
  CHECK((halved.log_weights - direct.log_weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rebase_cumulative does not underflow for large cumulative losses") {
  ParticleMeasure prior = two_atom(1, 1);
  Eigen::VectorXd cum(2);
  cum << 0.0, 1e4;  // beta * loss spread of 1e4 * beta
  const ParticleMeasure pm = rebase_cumulative(prior, cum, 1.0);
  CHECK(std::isfinite(pm.log_weights(0)));
  CHECK(pm.log_weights(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pm.log_weights(1) == doctest::Approx(-1e4).epsilon(1e-12));
}

TEST_CASE("relative_entropy: values and Gibbs inequality") {
  ParticleMeasure m = two_atom(1, 1);
  CHECK(relative_entropy(m, m) == 0.0);

  // point mass on one of N uniform atoms -> ln N
  Eigen::VectorXd w(2);
  w << 1, 0;
  ParticleMeasure point = from_atoms({euclid({0, 0}), euclid({1, 0})}, w);
  CHECK(relative_entropy(point, m) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(relative_entropy(m, point) == std::numeric_limits<double>::infinity());

  ParticleMeasure mu = two_atom(0.25, 0.75);
  const double expected = 0.25 * std::log(0.5) + 0.75 * std::log(1.5);
  CHECK(relative_entropy(mu, m) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(relative_entropy(mu, m) == doctest::Approx(0.13081203594113695).epsilon(1e-12));

  // nonnegativity on random weight pairs, zero only at equality
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    ParticleMeasure a = two_atom(rng.uniform(0.01, 1), rng.uniform(0.01, 1));
    ParticleMeasure b = two_atom(rng.uniform(0.01, 1), rng.uniform(0.01, 1));
    const double e = relative_entropy(a, b);
    CHECK(e >= 0.0);
    if ((linear_weights(a) - linear_weights(b)).cwiseAbs().maxCoeff() > 1e-6) {
      CHECK(e > 0.0);
    }
  }
}

TEST_CASE("effective_sample_size") {
  Eigen::VectorXd w(3);
  w << 1, 1, 1;
  ParticleMeasure uniform =
      from_atoms({euclid({0, 0}), euclid({1, 0}), euclid({0, 1})}, w);
  CHECK(effective_sample_size(uniform) == doctest::Approx(3.0).epsilon(1e-13));

  Eigen::VectorXd wp(2);
  wp << 1, 0;
  ParticleMeasure point = from_atoms({euclid({0, 0}), euclid({1, 0})}, wp);
  CHECK(effective_sample_size(point) == doctest::Approx(1.0).epsilon(1e-13));

  CHECK(effective_sample_size(two_atom(2, 1)) == doctest::Approx(1.8).epsilon(1e-13));
}

TEST_CASE("particle CSV snapshot") {
  ParticleMeasure pm = two_atom(1, 3);
  std::ostringstream os;
  write_csv(pm, os);
  const std::string text = os.str();
  CHECK(text.find("0,0,") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
