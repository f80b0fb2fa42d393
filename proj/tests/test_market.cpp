#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <cstring>
#include <random>

#include "support.hpp"
#include "tsm/market.hpp"

using namespace tsm;
using tsm::test::rel_diff;
using Big = boost::multiprecision::cpp_dec_float_50;

TEST_CASE("coefficients by direct substitution") {
  MarketParams p;
  p.alpha = 0.5;
  p.beta = 1.0;
  p.gamma = 0.3;
  p.psi = 0.1;
  p.phi = 2;
  const Coefficients c = derive_coefficients(p);
  CHECK(c.a1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.a2 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.a3 == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(c.a4 == doctest::Approx(1.0).epsilon(1e-15));

  p.beta = 0;
  CHECK(derive_coefficients(p).a2 == 1.0);
}

TEST_CASE("coefficients against decimal arithmetic") {
  MarketParams p;
  p.alpha = 0.38;
  p.beta = 1.5;
  p.gamma = 0.2;
  p.psi = 0.05;
  p.phi = 1.5;
  const Coefficients c = derive_coefficients(p);

  const Big alpha("0.38"), beta("1.5"), gamma("0.2"), psi("0.05"), phi("1.5");
  const Big a1 = gamma - alpha * psi, a2 = 1 - alpha * beta, a3 = psi - gamma * beta, a4 = alpha * phi;
  const Big A = (a4 - phi) / a2 + 1, B = (a1 + a3) / a2 - 1;
  CHECK(c.a1 == doctest::Approx(a1.convert_to<double>()).epsilon(1e-14));
  CHECK(c.a2 == doctest::Approx(a2.convert_to<double>()).epsilon(1e-14));
  CHECK(c.a3 == doctest::Approx(a3.convert_to<double>()).epsilon(1e-14));
  CHECK(c.a4 == doctest::Approx(a4.convert_to<double>()).epsilon(1e-14));
  CHECK(c.share_exp_A == doctest::Approx(A.convert_to<double>()).epsilon(1e-13));
  CHECK(c.share_exp_B == doctest::Approx(B.convert_to<double>()).epsilon(1e-13));
  // Hand-computed: 0.181, 0.43, -0.25, 0.57.
  CHECK(c.a1 == doctest::Approx(0.181));
  CHECK(c.a3 == doctest::Approx(-0.25));
}

TEST_CASE("validation names the violated invariant") {
  MarketParams p;
  p.alpha = 1.2;
  REQUIRE(find_violation(p).has_value());
  CHECK(find_violation(p)->find("alpha") != std::string::npos);
  CHECK_THROWS_AS(validate(p), InvalidParams);

  p = MarketParams{};
  p.beta = 2.7;  // alpha*beta = 1.026
  CHECK_THROWS_AS(validate(p), InvalidParams);
  p = MarketParams{};
  p.gamma = 0.4;
  CHECK_THROWS_AS(validate(p), InvalidParams);
  p = MarketParams{};
  p.k1 = 0;
  CHECK_THROWS_AS(validate(p), InvalidParams);
  p = MarketParams{};
  p.f_c = -1;
  CHECK_THROWS_AS(validate(p), InvalidParams);
  CHECK_NOTHROW(validate(MarketParams{}));
}

TEST_CASE("consumer demand primitive") {
  MarketParams p;
  p.k1 = 0.5;
  p.gamma = 0;
  p.alpha = 0.5;
  CHECK(consumer_demand_primitive(2, 4, p) == doctest::Approx(1.0).epsilon(1e-15));

  p = MarketParams{};
  p.k1 = 1;
  CHECK(consumer_demand_primitive(1, 1, p) == 1.0);

  // Default-range midpoint against 50-digit evaluation.
  p = MarketParams{};
  p.k1 = 0.5;
  p.gamma = 0.2;
  p.alpha = 0.38;
  const Big exact = Big("0.5") * pow(Big("1.7"), Big("-0.2")) * pow(Big(32), Big("0.38"));
  CHECK(rel_diff(consumer_demand_primitive(1.7, 32, p), exact.convert_to<double>()) <= 1e-14);

  CHECK_THROWS_AS(consumer_demand_primitive(0, 1, p), DomainError);
  CHECK_THROWS_AS(consumer_demand_primitive(1, -1, p), DomainError);
}

TEST_CASE("supply primitive") {
  MarketParams p;
  p.k2 = 1;
  p.phi = 1;
  p.psi = 0;
  p.beta = 0;
  CHECK(supply_primitive(0.5, 3, 7, p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(supply_primitive(1.0, 3, 7, p), DomainError);
  CHECK_THROWS_AS(supply_primitive(0.0, 3, 7, p), DomainError);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const MarketParams q = test::random_params(rng);
    const double share = u(rng), price = 5 * u(rng), demand = 10 * u(rng);
    const Big direct = Big(q.k2) * pow(Big(share), Big(q.phi)) * pow(Big(price), Big(q.psi)) *
                       pow(Big(demand), Big(q.beta));
    CHECK(rel_diff(supply_primitive(share, price, demand, q), direct.convert_to<double>()) <= 1e-12);
  }
}

TEST_CASE("reduced demand special case and linear-system oracle") {
  MarketParams p;
  p.k1 = 1;
  p.k2 = 1;
  p.phi = 0;
  const Coefficients c = derive_coefficients(p);
  for (double price : {0.3, 1.0, 2.5}) {
    CHECK(rel_diff(demand_reduced(price, 0.4, p), std::pow(price, -c.a1 / c.a2)) <= 1e-13);
  }

  // Default-range midpoint: solve the log-linear system of the two structural
  // equations by Cramer's rule in long double.
  p = MarketParams{};
  p.k1 = 0.5;
  const double price = 1.7, share = 0.5;
  using L = long double;
  // x = log Dc, y = log Ds:  x - alpha*y = log k1 - gamma log P
  //                         -beta*x + y = log k2 + phi log chi + psi log P
  const L m11 = 1, m12 = -static_cast<L>(p.alpha), m21 = -static_cast<L>(p.beta), m22 = 1;
  const L r1 = std::log(static_cast<L>(p.k1)) - p.gamma * std::log(static_cast<L>(price));
  const L r2 = std::log(static_cast<L>(p.k2)) + p.phi * std::log(static_cast<L>(share)) +
               p.psi * std::log(static_cast<L>(price));
  const L det = m11 * m22 - m12 * m21;
  const L x = (r1 * m22 - m12 * r2) / det;
  const L y = (m11 * r2 - m21 * r1) / det;
  CHECK(rel_diff(demand_reduced(price, share, p), static_cast<double>(std::exp(x))) <= 1e-13);
  CHECK(rel_diff(supply_reduced(price, share, p), static_cast<double>(std::exp(y))) <= 1e-13);
}

TEST_CASE("reduced forms are a fixed point of the structural equations") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  int skipped = 0;
  for (int i = 0; i < 10000; ++i) {
    const MarketParams p = test::random_params(rng);
    const double price = 0.05 + 5 * u(rng), share = 0.001 + 0.998 * u(rng);
    const double dc = demand_reduced(price, share, p), ds = supply_reduced(price, share, p);
    // alpha*beta near 1 pushes exponents past what a double can represent.
    if (!std::isnormal(dc) || !std::isnormal(ds)) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, rel_diff(consumer_demand_primitive(price, ds, p), dc));
    worst = std::max(worst, rel_diff(supply_primitive(share, price, dc, p), ds));
  }
  CHECK(worst <= 1e-9);
  CHECK(skipped < 500);
}

TEST_CASE("monotonicity of the reduced forms") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const MarketParams p = test::random_params(rng);
    const Coefficients c = derive_coefficients(p);
    const double p1 = 0.1 + 3 * u(rng), p2 = p1 * (1.01 + u(rng));
    const double s1 = 0.01 + 0.9 * u(rng), s2 = s1 + (0.99 - s1) * (0.01 + 0.98 * u(rng));
    if (c.a1 > 0) CHECK(demand_reduced(p2, 0.5, p) < demand_reduced(p1, 0.5, p));
    if (p.phi > 0 && std::isnormal(supply_reduced(1.0, s1, p))) CHECK(supply_reduced(1.0, s2, p) > supply_reduced(1.0, s1, p));
    CHECK(c.a2 > 0);
    CHECK(c.a2 <= 1);
  }
}

TEST_CASE("provider payoff") {
  MarketParams p = MarketParams{};
  p.f_c = 1.0;
  CHECK(provider_payoff(2.0, 0.5, p) == doctest::Approx(0.0).epsilon(1e-15));

  p.f_c = 0;
  double previous = provider_payoff(2.0, 0.9, p);
  for (double share : {0.99, 0.999, 0.9999}) {
    const double value = provider_payoff(2.0, share, p);
    CHECK(value > 0);
    CHECK(value < previous);
    previous = value;
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const MarketParams q = test::random_params(rng);
    const double price = 0.1 + 4 * u(rng), share = 0.01 + 0.98 * u(rng);
    const double composed = (price * (1 - share) - q.f_c) * demand_reduced(price, share, q);
    CHECK(rel_diff(provider_payoff(price, share, q), composed) <= 1e-12);
  }
}

TEST_CASE("cloud payoff") {
  MarketParams p = MarketParams{};
  p.f_s = 0;
  const double payoff = cloud_payoff(1.5, 0.3, p);
  CHECK(payoff >= 0);
  CHECK(rel_diff(payoff, 1.5 * 0.3 * demand_reduced(1.5, 0.3, p)) <= 1e-15);

  p = MarketParams{};
  p.phi = 2;
  CHECK(std::abs(cloud_payoff(1.5, 1e-12, p)) < 1e-6);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const MarketParams q = test::random_params(rng);
    const double price = 0.1 + 4 * u(rng), share = 0.01 + 0.98 * u(rng);
    const double compact = cloud_payoff(price, share, q), expanded = cloud_payoff_expanded(price, share, q);
    // Relative to the larger of the two terms; the difference can cancel.
    const double scale = std::max(price * share * demand_reduced(price, share, q),
                                  q.f_s * supply_reduced(price, share, q));
    worst = std::max(worst, std::abs(compact - expanded) / scale);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("feasibility flags") {
  MarketParams p;
  p.alpha = 0.5;
  p.beta = 1.0;
  p.gamma = 0.3;
  p.psi = 0.1;
  CHECK_FALSE(check_feasibility(p).f2_price_max);

  p.beta = 1.8;
  const Coefficients c = derive_coefficients(p);
  CHECK(c.a1 == doctest::Approx(0.25));
  CHECK(c.a2 == doctest::Approx(0.1));
  CHECK(check_feasibility(p).f1_price_positive);
  CHECK(check_feasibility(p).f2_price_max);

  p = MarketParams{};
  p.phi = 5;
  p.alpha = 0.38;
  p.beta = 1.0;
  CHECK(check_feasibility(p).f3_share_max);

  CHECK(check_feasibility(test::feasible_fixture()).all_ok);
}

TEST_CASE("operations are pure") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const MarketParams p = test::random_params(rng);
    CHECK(derive_coefficients(p) == derive_coefficients(p));
    const double a = cloud_payoff(1.3, 0.4, p), b = cloud_payoff(1.3, 0.4, p);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}
