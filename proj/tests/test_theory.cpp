#include <doctest.h>

#include <cmath>

#include "fpp/theory.hpp"

using namespace fpp;

TEST_CASE("condition validation per family") {
    const WeightModel exp_model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    const ConditionReport r1 = validate_conditions(exp_model);
    CHECK(r1.accept());
    CHECK(r1.uniform_square_int);
    CHECK(r1.higher_moment);
    CHECK(std::isinf(r1.higher_moment_p));

    const WeightModel pareto25(2, AssignIid{DistributionSpec::pareto(2.5, 0.5)}, 1);
    const ConditionReport r2 = validate_conditions(pareto25);
    CHECK(r2.accept());
    CHECK(r2.higher_moment);
    CHECK(r2.higher_moment_p == doctest::Approx(2.4));

    const WeightModel pareto15(2, AssignIid{DistributionSpec::pareto(1.5, 0.5)}, 1);
    const ConditionReport r3 = validate_conditions(pareto15);
    CHECK(!r3.accept());
    CHECK(!r3.second_moment);

    // Second moment barely finite: square-integrability holds but no safe
    // higher moment.
    const WeightModel pareto205(2, AssignIid{DistributionSpec::pareto(2.05, 0.5)}, 1);
    const ConditionReport r4 = validate_conditions(pareto205);
    CHECK(r4.accept());
    CHECK(r4.uniform_square_int);
    CHECK(!r4.higher_moment);

    // Mixed rule takes the worst case.
    const WeightModel mixed(
        2, AssignParity{DistributionSpec::exponential(1.0), DistributionSpec::pareto(2.5, 0.5)}, 1);
    const ConditionReport r5 = validate_conditions(mixed);
    CHECK(r5.accept());
    CHECK(r5.higher_moment_p == doctest::Approx(2.4));
}

TEST_CASE("exponent defaults are the exact rationals") {
    const WeightModel m2(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    const ModelConstants c2 = ModelConstants::compute(m2);
    CHECK(c2.alpha == 15.0 / 32.0);
    CHECK(c2.eps0 == 1.0 / 8.0);
    CHECK(c2.delta == 1.0 / 4.0);

    const WeightModel m3(3, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    const ModelConstants c3 = ModelConstants::compute(m3);
    CHECK(std::abs(c3.alpha * 48.0 - 23.0) <= 1e-9);
    CHECK(std::abs(c3.eps0 * 12.0 - 1.0) <= 1e-9);
    CHECK(std::abs(c3.delta * 6.0 - 1.0) <= 1e-9);
}

TEST_CASE("constructive chernoff rate, point mass") {
    const WeightModel model(2, AssignIid{DistributionSpec::point_mass(1.0)}, 1);
    const Beta1Result b = compute_beta1(model, 2);
    CHECK(b.eps_star == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(b.s_star == doctest::Approx((12.0 + std::log(2.0)) / b.eps_star).epsilon(1e-12));
    CHECK(b.beta1 == doctest::Approx(std::min(0.99 * 8.0 / b.s_star, 0.99)).epsilon(1e-12));
    CHECK(b.beta1 > 0);
    CHECK(b.beta1 < 1.0);

    // Every m-edge path has passage time exactly m, never below beta1 * m.
    const TailCheckResult tail = mc_tail_check(model, b.beta1, 10, 10000, 3);
    CHECK(tail.frequency == 0.0);
    CHECK(tail.pass);
}

TEST_CASE("constructive chernoff rate, exponential") {
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
    const Beta1Result b = compute_beta1(model, 2);
    const double eps_expected = -std::log1p(-std::exp(-12.0) / 2.0);
    CHECK(b.eps_star == doctest::Approx(eps_expected).epsilon(1e-3));
    CHECK(b.beta1 == doctest::Approx(0.99 * 8.0 / b.s_star).epsilon(1e-12));
    CHECK(b.beta1 < 1.0);

    for (int m : {10, 20}) {
        const TailCheckResult tail = mc_tail_check(model, b.beta1, m, 10000, 3);
        CHECK(tail.pass);
    }
}

TEST_CASE("beta1 stays below mu across models") {
    const std::vector<DistributionSpec> specs = {
        DistributionSpec::point_mass(1.0), DistributionSpec::uniform(0.5, 1.5),
        DistributionSpec::exponential(1.0), DistributionSpec::pareto(2.5, 0.5),
        DistributionSpec::two_point(1.0, 4.0, 0.5)};
    for (const auto& spec : specs) {
        const WeightModel model(2, AssignIid{spec}, 1);
        const ModelConstants c = ModelConstants::compute(model);
        INFO(spec.to_string());
        CHECK(c.beta1 > 0);
        CHECK(c.beta1 < c.mu);
        CHECK(c.essinf == spec.essinf());
    }
}

TEST_CASE("box radius formula") {
    ModelConstants c;
    c.mu = 1.0;
    c.beta1 = 0.5;
    const auto r = box_radius(4, 0.0, c, 1 << 20);
    CHECK(r.radius == 64);
    CHECK(!r.capped);
    ModelConstants unit = c;
    unit.beta1 = 1.0;  // mu over beta1 equal to one
    CHECK(box_radius(1, 0.0, unit, 1 << 20).radius == 8);
    const auto capped = box_radius(8, 3.0, c, 1000);
    CHECK(capped.capped);
    CHECK(capped.radius == 1000);
    CHECK_THROWS(box_radius(0, 0.0, c, 10));
}

TEST_CASE("mixed model constants take the worst case") {
    const WeightModel mixed(
        2, AssignParity{DistributionSpec::uniform(0.5, 1.5), DistributionSpec::exponential(1.0)}, 1);
    const ModelConstants c = ModelConstants::compute(mixed);
    CHECK(c.mu == 1.0);
    CHECK(c.sup_second_moment == 2.0);
    CHECK(c.essinf == 0.0);
}
