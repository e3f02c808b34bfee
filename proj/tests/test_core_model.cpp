#include "doctest.h"
#include "nsmbs/core_model.hpp"
#include "test_models.hpp"

#include <algorithm>
#include <random>

using namespace nsmbs;

static Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

TEST_CASE("active set uses g <= 0") {
    CHECK(active_set(vec({0.5, -0.001, 0.0, 0.2})) == IndexSet{1, 2});
    CHECK(active_set(vec({1.0, 2.0})).empty());
    CHECK(active_set(vec({0.0, 0.0, 0.0})) == IndexSet{0, 1, 2});
}

TEST_CASE("newly closed contacts") {
    CHECK(newly_closed(vec({0.001}), vec({-0.0001})) == IndexSet{0});
    CHECK(newly_closed(vec({-0.1}), vec({-0.2})).empty());
    CHECK(newly_closed(vec({0.1, 0.1}), vec({0.1, 0.0})) == IndexSet{1});
    CHECK_THROWS_AS(newly_closed(vec({0.1}), vec({0.1, 0.2})), Error);
}

TEST_CASE("active set monotone and newly closed subset") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
        Vector a(6), b(6);
        for (int i = 0; i < 6; ++i) {
            a[i] = U(rng);
            b[i] = U(rng);
        }
        const Vector lower = a.cwiseMin(b);
        const IndexSet sa = active_set(a), sl = active_set(lower);
        for (int k : sa) CHECK(std::find(sl.begin(), sl.end(), k) != sl.end());
        const IndexSet nc = newly_closed(a, b), ab = active_set(b), aa = active_set(a);
        for (int k : nc) {
            CHECK(std::find(ab.begin(), ab.end(), k) != ab.end());
            CHECK(std::find(aa.begin(), aa.end(), k) == aa.end());
        }
    }
}

TEST_CASE("initial acceleration") {
    const auto free = testmodels::Linear::sdof(1.0, 0.0, 0.0, -9.81);
    CHECK(initial_acceleration(free, Vector::Zero(1), Vector::Zero(1))[0] == doctest::Approx(-9.81));

    Matrix M(2, 2), C(2, 2), K(2, 2);
    M << 2, 0.3, 0.3, 1;
    C << 0.1, 0, 0, 0.2;
    K << 5, -1, -1, 3;
    Vector h(2), q(2), v(2);
    h << 1, -2;
    q << 0.1, 0.2;
    v << -0.3, 0.4;
    const testmodels::Linear lin(M, C, K, h);
    const Vector a = initial_acceleration(lin, q, v);
    const Vector rhs = h - K * q - C * v;
    CHECK((M * a - rhs).norm() <= 1e-10 * rhs.norm());
}

TEST_CASE("initial acceleration with a resting contact") {
    const testmodels::Block block(2.0, 9.81, 0.3, 0.0);
    Vector q(2), v(2);
    q << 0.0, 0.0;
    v << 0.0, 0.0;
    const Vector a = initial_acceleration(block, q, v);
    CHECK(std::abs(a[1]) < 1e-10);
    InitialAccelerationOptions strict;
    strict.include_contact_forces = false;
    CHECK(initial_acceleration(block, q, v, strict)[1] == doctest::Approx(-9.81));
}

TEST_CASE("system evaluation validation") {
    const testmodels::Block block(1.0, 9.81, 0.0, 0.0);
    SystemEvaluation e = block.evaluate(Vector::Zero(2), Vector::Zero(2));
    CHECK_NOTHROW(e.validate());
    e.M(0, 1) = 0.5;
    CHECK_THROWS_AS(e.validate(), Error);
    e = block.evaluate(Vector::Zero(2), Vector::Zero(2));
    e.g_N = Vector::Zero(2);
    CHECK_THROWS_AS(e.validate(), Error);
}

TEST_CASE("contact parameter ranges") {
    CHECK_THROWS_AS(ContactParameters::uniform(2, 1.2, 0, 0), Error);
    CHECK_THROWS_AS(ContactParameters::uniform(2, 0.5, 0, -0.1), Error);
    CHECK_NOTHROW(ContactParameters::uniform(2, 1.0, 0.0, 0.3));
}
