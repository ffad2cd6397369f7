#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "hyst/solver.hpp"
#include "schema_check.hpp"
#include "test_util.hpp"

using namespace hyst;
using doctest::Approx;

namespace {

PlayEquation manufactured(const PlSignal& u_star, double c_id, double c_play,
                          const PlayConfig& cfg) {
    PlayResult pr = play(u_star, cfg);
    std::vector<double> fv;
    for (std::size_t i = 0; i < u_star.node_count(); ++i) {
        double t = u_star.grid().nodes()[i];
        fv.push_back(c_id * u_star.values()[i] + c_play * pr.w.eval(t));
    }
    return PlayEquation{c_id, c_play, cfg, PlSignal(u_star.grid(), fv)};
}

}  // namespace

TEST_CASE("equation validation") {
    PlSignal f({0.0, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS((PlayEquation{0.0, 1.0, {1.0, 0.0}, f}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PlayEquation{1.0, -1.0, {1.0, 0.0}, f}.validate()), std::invalid_argument);
    PlayEquation ok{1.0, 0.5, {1.0, 0.0}, f};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("residual") {
    std::mt19937 rng(81);
    PlSignal u_star = testutil::random_pl(rng, 0.0, 1.0, 6, 1.0);
    PlayConfig cfg{0.5, 0.0};
    PlayEquation eq = manufactured(u_star, 1.0, 1.0, cfg);
    CHECK(residual_sup(residual(eq, u_star)) <= 1e-13);

    // c_play = 0: plain linear residual
    PlayEquation lin{2.0, 0.0, cfg, eq.f};
    std::vector<double> r = residual(lin, u_star);
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(r[i] == Approx(2.0 * u_star.values()[i] - eq.f.values()[i]));

    // r = 0: the play is the identity
    PlayEquation rid{1.0, 1.0, {0.0, 0.0}, eq.f};
    std::vector<double> r2 = residual(rid, u_star);
    for (std::size_t i = 0; i < r2.size(); ++i)
        CHECK(r2[i] == Approx(2.0 * u_star.values()[i] - eq.f.values()[i]).epsilon(1e-12));

    PlSignal wrong_grid({0.0, 0.4, 1.0}, {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(residual(eq, wrong_grid), std::domain_error);
}

TEST_CASE("newton_matrix structure") {
    PlSignal u({0.0, 1.0, 2.0}, {0.0, 0.2, -0.1});

    // c_play = 0: plain scaled identity
    PlayEquation lin{3.0, 0.0, {1.0, 0.0}, u};
    NewtonMatrix m0 = newton_matrix(lin, u);
    for (std::size_t i = 0; i < m0.n; ++i)
        for (std::size_t j = 0; j < m0.n; ++j)
            CHECK(m0.at(i, j) == (i == j ? 3.0 : 0.0));

    // frozen phase: every play row reduces to the basis row at t = a
    PlayEquation froz{1.0, 1.0, {2.0, 0.0}, u};
    NewtonMatrix mf = newton_matrix(froz, u);
    for (std::size_t i = 0; i < mf.n; ++i) {
        CHECK(mf.at(i, 0) == Approx(1.0 * (i == 0 ? 2.0 : 1.0)));
        for (std::size_t j = 1; j < mf.n; ++j)
            CHECK(mf.at(i, j) == Approx(i == j ? 1.0 : 0.0));
    }

    // fully moving phase: the play picks the direction at m(t) = t
    PlSignal inc({0.0, 1.0, 2.0}, {0.0, 2.0, 4.0});
    PlayEquation mov{1.0, 1.0, {0.5, 0.5}, inc};
    NewtonMatrix mm = newton_matrix(mov, inc);
    for (std::size_t i = 1; i < mm.n; ++i)
        for (std::size_t j = 0; j < mm.n; ++j)
            CHECK(mm.at(i, j) == Approx(i == j ? 2.0 : 0.0));
}

TEST_CASE("semismooth newton on manufactured problems") {
    std::mt19937 rng(82);
    for (int it = 0; it < 5; ++it) {
        PlSignal u_star = testutil::random_pl(rng, 0.0, 1.0, 8, 1.0);
        double c_play = it % 2 ? 0.5 : 1.0;
        PlayConfig cfg{0.4, 0.1};
        PlayEquation eq = manufactured(u_star, 1.0, c_play, cfg);
        PlSignal u0(eq.f.grid(), std::vector<double>(eq.f.node_count(), 0.0));
        SolveReport rep = semismooth_newton(eq, u0, 1e-10, 20, /*damping=*/false);
        CHECK(rep.converged);
        CHECK(rep.iterations <= 8);
        CHECK(rep.residual_norms.back() <= 1e-10);
        // converged iterate reproduces f through forward evaluation
        PlSignal u_sol(eq.f.grid(), rep.solution_values);
        CHECK(residual_sup(residual(eq, u_sol)) <= 1e-10);
        // superlinear signature: ratios strictly decrease once ||R|| <= 1e-2
        for (std::size_t i = 1; i + 1 < rep.residual_norms.size(); ++i) {
            if (rep.residual_norms[i] <= 1e-2 && rep.residual_norms[i + 1] > 1e-10) {
                CHECK(rep.superlinear_ratios[i] < rep.superlinear_ratios[i - 1]);
            }
        }
    }
}

TEST_CASE("solver trivial cases") {
    std::mt19937 rng(83);
    PlSignal u_star = testutil::random_pl(rng, 0.0, 1.0, 5, 1.0);

    // linear case converges in one iteration
    PlayEquation lin{2.0, 0.0, {1.0, 0.0}, scale(u_star, 2.0)};
    PlSignal u0(lin.f.grid(), std::vector<double>(lin.f.node_count(), 0.0));
    SolveReport rl = semismooth_newton(lin, u0, 1e-12, 5, false);
    CHECK(rl.converged);
    CHECK(rl.iterations == 1);

    // starting at the solution: zero iterations
    PlayConfig cfg{0.3, 0.0};
    PlayEquation eq = manufactured(u_star, 1.0, 1.0, cfg);
    SolveReport r0 = semismooth_newton(eq, u_star, 1e-10, 5, false);
    CHECK(r0.converged);
    CHECK(r0.iterations == 0);
    for (std::size_t i = 0; i < u_star.node_count(); ++i)
        CHECK(r0.solution_values[i] == u_star.values()[i]);
}

TEST_CASE("solver with damping still converges") {
    std::mt19937 rng(84);
    PlSignal u_star = testutil::random_pl(rng, 0.0, 1.0, 7, 1.0);
    PlayConfig cfg{0.4, -0.1};
    PlayEquation eq = manufactured(u_star, 1.0, 1.0, cfg);
    PlSignal u0(eq.f.grid(), std::vector<double>(eq.f.node_count(), 0.5));
    SolveReport rep = semismooth_newton(eq, u0, 1e-10, 25, true);
    CHECK(rep.converged);
}

TEST_CASE("problem file loading and report schema") {
    std::mt19937 rng(85);
    PlSignal u_star = testutil::random_pl(rng, 0.0, 1.0, 5, 1.0);
    PlayConfig cfg{1.0, 0.0};
    PlayEquation eq = manufactured(u_star, 1.0, 0.5, cfg);

    std::string dir = "solver_test_io";
    std::filesystem::create_directories(dir);
    write_signal_csv_file(dir + "/f.csv", eq.f);
    {
        std::ofstream out(dir + "/problem.json");
        out << R"({"c_id": 1.0, "c_play": 0.5, "r": 1.0, "z0": 0.0,)"
            << R"( "f": "f.csv", "grid": "from-f"})";
    }
    LoadedProblem lp = load_problem(dir + "/problem.json");
    CHECK(lp.eq.c_play == 0.5);
    CHECK(lp.eq.f.node_count() == eq.f.node_count());
    CHECK(lp.u0.node_count() == eq.f.node_count());

    SolveReport rep = semismooth_newton(lp.eq, lp.u0, 1e-10, 20, false);
    CHECK(rep.converged);

    nlohmann::json doc = nlohmann::json::parse(rep.to_json());
    std::ifstream schema_in(std::string(SCHEMA_DIR) + "/solve_report.schema.json");
    REQUIRE(schema_in.good());
    nlohmann::json schema;
    schema_in >> schema;
    std::string why;
    CHECK_MESSAGE(testutil::validate_schema(doc, schema, &why), why);

    CHECK_THROWS_AS(load_problem(dir + "/missing.json"), std::runtime_error);
    {
        std::ofstream out(dir + "/bad.json");
        out << R"({"c_id": 1.0})";
    }
    CHECK_THROWS_AS(load_problem(dir + "/bad.json"), std::runtime_error);
}
