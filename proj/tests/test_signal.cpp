#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hyst/signal.hpp"
#include "test_util.hpp"

using namespace hyst;
using doctest::Approx;

TEST_CASE("TimeGrid validation") {
    CHECK_THROWS_AS(TimeGrid({0.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({1.0, 0.0}), std::invalid_argument);
    CHECK(TimeGrid({0.0, 1.0, 2.0}).size() == 3);
}

TEST_CASE("eval is linear interpolation, exact at nodes") {
    PlSignal a({0.0, 1.0}, {0.0, 2.0});
    CHECK(a.eval(0.5) == Approx(1.0).epsilon(1e-15));
    PlSignal b({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0});
    CHECK(b.eval(1.0) == 0.0);
    PlSignal c({0.0, 2.0}, {3.0, 3.0});
    CHECK(c.eval(1.7) == 3.0);
    CHECK_THROWS_AS(a.eval(-0.1), std::domain_error);
    CHECK_THROWS_AS(a.eval(1.1), std::domain_error);
}

TEST_CASE("sup_norm") {
    CHECK(sup_norm(PlSignal({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0})) == 1.0);
    CHECK(sup_norm(PlSignal({0.0, 1.0}, {-2.0, 1.0})) == 2.0);
    // capped ramp h_lambda with lambda = 0.1: sup = 2 lambda
    double lam = 0.1;
    PlSignal h({0.0, lam, 1.0}, {0.0, 2 * lam, 2 * lam});
    CHECK(sup_norm(h) == Approx(0.2).epsilon(1e-15));
}

TEST_CASE("w1p_norm") {
    PlSignal u({0.0, 1.0}, {1.0, 0.0});  // 1 - s
    CHECK(w1p_norm(u, 2.0) == Approx(2.0).epsilon(1e-15));
    PlSignal c({0.0, 3.0}, {5.0, 5.0});
    CHECK(w1p_norm(c, 2.0) == Approx(5.0));
    CHECK(w1p_norm(c, 7.3) == Approx(5.0));
    CHECK_THROWS_AS(w1p_norm(u, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(w1p_norm(u, 0.5), std::invalid_argument);
    double lam = 0.25;
    PlSignal h({0.0, lam, 1.0}, {0.0, 2 * lam, 2 * lam});
    CHECK(w11_norm(h) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("w1p_norm homogeneity and triangle inequality") {
    std::mt19937 rng(11);
    for (int it = 0; it < 20; ++it) {
        PlSignal u = testutil::random_pl(rng, 0.0, 2.0, 6, 1.0);
        PlSignal v = testutil::random_pl(rng, 0.0, 2.0, 5, 1.0);
        double p = 1.5 + (it % 3);
        CHECK(w1p_norm(scale(u, -2.5), p) == Approx(2.5 * w1p_norm(u, p)).epsilon(1e-12));
        CHECK(w1p_norm(add(u, v), p) <= w1p_norm(u, p) + w1p_norm(v, p) + 1e-12);
    }
}

TEST_CASE("holder_norm") {
    PlSignal u({0.0, 1.0}, {1.0, 0.0});
    CHECK(holder_norm(u, 1.0) == Approx(2.0).epsilon(1e-15));
    PlSignal c({0.0, 3.0}, {-4.0, -4.0});
    CHECK(holder_norm(c, 0.7) == Approx(4.0));
    PlSignal lin({0.0, 4.0}, {0.0, 4.0});
    CHECK(holder_norm(lin, 0.5) == Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(holder_norm(u, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(holder_norm(u, 1.5), std::invalid_argument);
}

TEST_CASE("holder_norm vs dense brute force") {
    std::mt19937 rng(7);
    for (int it = 0; it < 8; ++it) {
        PlSignal u = testutil::random_pl(rng, 0.0, 1.0, 5, 1.0);
        double alpha = it % 2 ? 0.5 : 0.3;
        double brute = 0.0;
        const int N = 400;
        for (int i = 0; i <= N; ++i) {
            for (int j = i + 1; j <= N; ++j) {
                double s = static_cast<double>(i) / N, t = static_cast<double>(j) / N;
                brute = std::max(brute, std::abs(u.eval(t) - u.eval(s)) /
                                            std::pow(t - s, alpha));
            }
        }
        brute += std::abs(u.values().front());
        double got = holder_norm(u, alpha);
        CHECK(got >= brute - 1e-9);            // candidate set contains the grid pairs
        CHECK(got <= brute * 1.01 + 1e-9);     // approximation stays near the dense scan
    }
}

TEST_CASE("lq_norm closed form") {
    CHECK(lq_norm(StepLinSignal::constant(0, 1, 2.0), 2.0) == Approx(2.0).epsilon(1e-15));
    StepLinSignal ramp({{0.0, 1.0, 0.0, 1.0}});
    CHECK(lq_norm(ramp, 1.0) == Approx(0.5).epsilon(1e-15));
    StepLinSignal cen({{0.0, 1.0, -0.5, 0.5}});
    CHECK(lq_norm(cen, 2.0) == Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-14));
    CHECK_THROWS_AS(lq_norm(ramp, 2.0, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(lq_norm(ramp, 0.5), std::invalid_argument);
}

TEST_CASE("lq_norm agrees with Riemann sums on random step signals") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    for (int it = 0; it < 6; ++it) {
        std::vector<StepLinSignal::Segment> segs;
        double t = 0.0;
        for (int k = 0; k < 5; ++k) {
            double t1 = t + 0.2 + 0.1 * k;
            segs.push_back({t, t1, uv(rng), uv(rng)});
            t = t1;
        }
        StepLinSignal v(segs);
        double q = 1.0 + 0.7 * it;
        const int N = 100000;
        double acc = 0.0, a = v.a(), b = v.b();
        for (int i = 0; i < N; ++i) {
            double x = a + (b - a) * (i + 0.5) / N;
            acc += std::pow(std::abs(v.eval_right(x)), q) * (b - a) / N;
        }
        double riemann = std::pow(acc, 1.0 / q);
        CHECK(testutil::rel_err(lq_norm(v, q), riemann) <= 1e-6);
    }
}

TEST_CASE("modulus_of_continuity") {
    PlSignal lin({0.0, 1.0}, {0.0, 1.0});
    CHECK(modulus_of_continuity(lin, 0.3) == Approx(0.3).epsilon(1e-14));
    PlSignal c({0.0, 2.0}, {1.5, 1.5});
    CHECK(modulus_of_continuity(c, 0.4) == 0.0);
    PlSignal vee({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0});
    CHECK(modulus_of_continuity(vee, 0.5) == Approx(0.5).epsilon(1e-14));
    // eps beyond the window returns the global oscillation
    CHECK(modulus_of_continuity(vee, 5.0) == Approx(1.0));
}

TEST_CASE("modulus_of_continuity properties and brute force") {
    std::mt19937 rng(5);
    for (int it = 0; it < 10; ++it) {
        PlSignal u = testutil::random_pl(rng, 0.0, 1.0, 6, 1.0);
        double prev = 0.0;
        for (double eps : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            double w = modulus_of_continuity(u, eps);
            CHECK(w >= prev - 1e-12);           // nondecreasing in eps
            CHECK(w <= 2.0 * sup_norm(u) + 1e-12);
            prev = w;
        }
        double eps = 0.21;
        std::vector<double> pts;
        const int N = 400;
        for (int i = 0; i <= N; ++i) pts.push_back(static_cast<double>(i) / N);
        for (double t : u.grid().nodes()) {
            for (double x : {t, t - eps, t + eps})
                if (x >= 0.0 && x <= 1.0) pts.push_back(x);
        }
        double brute = 0.0;
        for (double s : pts)
            for (double t : pts)
                if (t >= s && t - s <= eps + 1e-15)
                    brute = std::max(brute, std::abs(u.eval(t) - u.eval(s)));
        CHECK(modulus_of_continuity(u, eps) == Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("signal algebra") {
    std::mt19937 rng(3);
    PlSignal u = testutil::random_pl(rng, 0.0, 1.0, 4, 1.0);
    CHECK(sup_norm(add(u, scale(u, -1.0))) == 0.0);
    PlSignal s1 = scale(u, 1.0);
    for (std::size_t i = 0; i < u.node_count(); ++i)
        CHECK(s1.values()[i] == u.values()[i]);
    PlSignal rs = restrict_signal(u, u.a(), u.b());
    CHECK(rs.node_count() == u.node_count());
    CHECK(sup_norm(subtract(rs, u)) == 0.0);
    PlSignal other({0.0, 0.5}, {0.0, 0.0});
    CHECK_THROWS_AS(add(u, other), std::domain_error);
    PlSignal sh = shift(u, 2.0);
    CHECK(sh.values()[0] == Approx(u.values()[0] + 2.0));
}

TEST_CASE("StepLinSignal evaluation conventions") {
    StepLinSignal v({{0.0, 1.0, 0.0, 1.0}, {1.0, 2.0, 5.0, 5.0}});
    CHECK(v.eval_left(1.0) == Approx(1.0));
    CHECK(v.eval_right(1.0) == Approx(5.0));
    CHECK(v.eval(1.0) == Approx(5.0));  // right-limit convention
    v.set_point_value(1.0, -3.0);
    CHECK(v.eval(1.0) == Approx(-3.0));
    CHECK(v.eval(2.0) == Approx(5.0));  // left limit at b
    CHECK_THROWS_AS(StepLinSignal({{0.0, 1.0, 0.0, 1.0}, {1.5, 2.0, 0.0, 0.0}}),
                    std::invalid_argument);
}

TEST_CASE("CSV round trip and errors") {
    std::mt19937 rng(17);
    PlSignal u = testutil::random_pl(rng, -1.0, 3.0, 7, 5.0);
    std::ostringstream os;
    write_signal_csv(os, u);
    std::istringstream is(os.str());
    PlSignal back = read_signal_csv(is);
    REQUIRE(back.node_count() == u.node_count());
    for (std::size_t i = 0; i < u.node_count(); ++i) {
        CHECK(back.grid().nodes()[i] == u.grid().nodes()[i]);
        CHECK(back.values()[i] == u.values()[i]);
    }

    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            read_signal_csv(in, "test");
            FAIL("expected parse error");
        } catch (const std::runtime_error& ex) {
            CHECK(std::string(ex.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("time,value\n0,1\n1,2\n", "row 1");
    expect_error("t,value\n0,1\nx,2\n", "row 3");
    expect_error("t,value\n0,1\n0,2\n", "row 3");
    expect_error("t,value\n1,2\n", "need at least 2");
}
