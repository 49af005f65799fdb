#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcsf/errors.hpp"
#include "lcsf/ident.hpp"
#include "lcsf/rng.hpp"
#include "lcsf/signals.hpp"

#include <cmath>

using namespace lcsf;

namespace {

/// Plain-loop re-implementation of the free-run recursion, kept independent
/// of the Eigen-based implementation under test.
std::vector<double> reference_simulate(const NoeModel& m, const std::vector<double>& u,
                                       const std::vector<double>& y_init) {
    const int k0 = std::max(m.m_y, m.m_u);
    std::vector<double> ys(u.size(), 0.0);
    for (int k = 0; k < m.m_y; ++k)
        ys[static_cast<std::size_t>(k)] =
            (y_init[static_cast<std::size_t>(k)] - m.scaling.y_mean) / m.scaling.y_std;
    std::vector<double> out;
    for (std::size_t k = static_cast<std::size_t>(k0); k < u.size(); ++k) {
        double acc = m.b_out;
        for (int h = 0; h < m.hidden; ++h) {
            double pre = m.b_hidden[h];
            for (int j = 0; j < m.m_y; ++j)
                pre += m.w_hidden(h, j) * ys[k - 1 - static_cast<std::size_t>(j)];
            for (int j = 0; j < m.m_u; ++j)
                pre += m.w_hidden(h, m.m_y + j) *
                       ((u[k - 1 - static_cast<std::size_t>(j)] - m.scaling.u_mean) /
                        m.scaling.u_std);
            acc += m.w_out[h] / (1.0 + std::exp(-pre));
        }
        ys[k] = acc;
        out.push_back(m.scaling.y_mean + m.scaling.y_std * acc);
    }
    return out;
}

std::vector<double> random_sequence(std::size_t n, std::uint64_t seed, double scale) {
    SplitMix64 rng(seed);
    std::vector<double> u(n);
    for (auto& s : u) s = rng.uniform(-scale, scale);
    return u;
}

/// Teacher-generated output sequence: y(0..m_y) seeded, the rest free-run.
std::vector<double> teacher_outputs(const NoeModel& teacher, const std::vector<double>& u) {
    std::vector<double> y_init{0.1, -0.05};
    const auto yhat = noe_simulate(teacher, u, y_init);
    std::vector<double> y = y_init;
    y.insert(y.end(), yhat.begin(), yhat.end());
    return y;
}

} // namespace

TEST_CASE("free-run simulation") {
    SUBCASE("constant network") {
        NoeModel model = NoeModel::zeros();
        model.b_out = 0.7;
        const auto yhat = noe_simulate(model, std::vector<double>(20, 1.0), {0.0, 0.0});
        CHECK(yhat.size() == 18);
        for (double v : yhat) CHECK(v == 0.7);
    }

    SUBCASE("zero output weights ignore the input") {
        NoeModel model = NoeModel::random_init(5, 1.0);
        model.w_out.setZero();
        model.b_out = -0.3;
        const auto a = noe_simulate(model, random_sequence(30, 1, 5.0), {0.2, 0.1});
        const auto b = noe_simulate(model, random_sequence(30, 2, 5.0), {0.2, 0.1});
        CHECK(a == b);
        for (double v : a) CHECK(v == -0.3);
    }

    SUBCASE("matches the reference recursion") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            NoeModel model = NoeModel::random_init(seed, 0.8);
            model.scaling = {0.4, 2.0, -0.1, 0.5};
            const auto u = random_sequence(20, seed + 50, 3.0);
            const auto ours = noe_simulate(model, u, {0.05, -0.02});
            const auto reference = reference_simulate(model, u, {0.05, -0.02});
            REQUIRE(ours.size() == reference.size());
            for (std::size_t k = 0; k < ours.size(); ++k)
                CHECK(ours[k] == doctest::Approx(reference[k]).epsilon(1e-12));
        }
    }

    SUBCASE("input shorter than the lags is rejected") {
        const NoeModel model = NoeModel::zeros();
        CHECK_THROWS_AS(noe_simulate(model, {1.0, 2.0}, {0.0, 0.0}), ConfigError);
    }
}

TEST_CASE("simulation Jacobian") {
    SUBCASE("zero output weights kill the hidden-layer columns") {
        NoeModel model = NoeModel::random_init(3, 1.0);
        model.w_out.setZero();
        const auto u = random_sequence(25, 9, 2.0);
        const Eigen::MatrixXd jac = noe_jacobian(model, u, {0.0, 0.0});
        // eta layout: w_hidden (hidden * n_x), b_hidden, then w_out, b_out.
        const int hidden_block = model.hidden * model.n_x() + model.hidden;
        CHECK(jac.leftCols(hidden_block).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("bias column is all ones for the zero network") {
        const NoeModel model = NoeModel::zeros();
        const auto u = random_sequence(25, 10, 2.0);
        const Eigen::MatrixXd jac = noe_jacobian(model, u, {0.0, 0.0});
        const Eigen::VectorXd b_out_col = jac.col(model.parameter_count() - 1);
        for (Eigen::Index i = 0; i < b_out_col.size(); ++i) CHECK(b_out_col[i] == 1.0);
    }

    SUBCASE("matches central finite differences on random networks") {
        const double h = 1e-6;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            NoeModel model = NoeModel::random_init(seed + 200, 0.5);
            const auto u = random_sequence(50, seed + 300, 1.5);
            const std::vector<double> y_init{0.1, -0.05};
            const Eigen::MatrixXd jac = noe_jacobian(model, u, y_init);
            const Eigen::VectorXd eta = model.parameters();
            for (Eigen::Index p = 0; p < eta.size(); p += 7) {  // sample of columns
                NoeModel up = model, down = model;
                Eigen::VectorXd eta_up = eta, eta_down = eta;
                eta_up[p] += h;
                eta_down[p] -= h;
                up.set_parameters(eta_up);
                down.set_parameters(eta_down);
                const auto y_up = noe_simulate(up, u, y_init);
                const auto y_down = noe_simulate(down, u, y_init);
                for (std::size_t k = 0; k < y_up.size(); ++k) {
                    const double fd = (y_up[k] - y_down[k]) / (2.0 * h);
                    const double an = jac(static_cast<Eigen::Index>(k), p);
                    CHECK(std::abs(an - fd) <= 1e-4 * std::abs(fd) + 1e-8);
                }
            }
        }
    }
}

TEST_CASE("Levenberg-Marquardt training") {
    TrainConfig config;

    SUBCASE("initialization at the teacher terminates immediately") {
        const NoeModel teacher = NoeModel::random_init(1, 0.8);
        const auto u = random_sequence(300, 2, 2.0);
        const auto y = teacher_outputs(teacher, u);
        const TrainResult result = train_lm(u, y, config, 0, teacher);
        CHECK(result.final_cost < 1e-18);
        CHECK(result.converged);
        CHECK(result.iterations <= 2);
    }

    SUBCASE("recovers the teacher from a small perturbation") {
        const NoeModel teacher = NoeModel::random_init(4, 0.8);
        const auto u = random_sequence(300, 5, 2.0);
        const auto y = teacher_outputs(teacher, u);

        NoeModel start = teacher;
        Eigen::VectorXd eta = start.parameters();
        SplitMix64 rng(6);
        for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] += rng.uniform(-1e-4, 1e-4);
        start.set_parameters(eta);

        TrainConfig short_run = config;
        short_run.max_iterations = 50;
        const TrainResult result = train_lm(u, y, short_run, 0, start);
        CHECK(result.final_cost < 1e-12);
    }

    SUBCASE("fits near-linear dynamics to sub-millimeter simulation error") {
        // y(k) = 0.5 y(k-1) + u(k-1), output RMS about 1.
        const auto make = [](std::uint64_t seed, std::size_t n) {
            const auto u = white_uniform_sequence(seed, 1.0, n);
            std::vector<double> y(n, 0.0);
            for (std::size_t k = 1; k < n; ++k) y[k] = 0.5 * y[k - 1] + u[k - 1];
            return std::pair{u, y};
        };
        const auto [u_train, y_train] = make(11, 1500);
        const auto [u_test, y_test] = make(12, 1500);

        const TrainResult result = train_lm(u_train, y_train, config, 3);
        const auto yhat = noe_simulate(result.model, u_test,
                                       {y_test[0], y_test[1]});
        const std::vector<double> reference(y_test.begin() + 2, y_test.end());
        CHECK(rmse(reference, yhat) < 1e-3);
    }

    SUBCASE("accepted cost sequence never increases") {
        const NoeModel teacher = NoeModel::random_init(7, 1.0);
        const auto u = random_sequence(400, 8, 2.0);
        const auto y = teacher_outputs(teacher, u);
        const TrainResult result = train_lm(u, y, config, 9);
        for (std::size_t i = 1; i < result.cost_trace.size(); ++i)
            CHECK(result.cost_trace[i] <= result.cost_trace[i - 1]);
        CHECK(result.final_cost <= result.cost_trace.front());
    }

    SUBCASE("deterministic in the seed") {
        const NoeModel teacher = NoeModel::random_init(13, 1.0);
        const auto u = random_sequence(350, 14, 2.0);
        const auto y = teacher_outputs(teacher, u);
        const TrainResult a = train_lm(u, y, config, 21);
        const TrainResult b = train_lm(u, y, config, 21);
        CHECK(a.model.parameters() == b.model.parameters());
        CHECK(a.final_cost == b.final_cost);
    }
}

TEST_CASE("RMSE") {
    SUBCASE("identical sequences") {
        const std::vector<double> y{1.0, -2.0, 3.0};
        CHECK(rmse(y, y) == 0.0);
    }

    SUBCASE("constant offset") {
        const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
        std::vector<double> shifted = y;
        for (auto& v : shifted) v += 0.25;
        CHECK(rmse(y, shifted) == doctest::Approx(0.25).epsilon(1e-15));
    }

    SUBCASE("hand-computed value") {
        CHECK(rmse({0.0, 3.0, 4.0}, {0.0, 0.0, 0.0}) ==
              doctest::Approx(2.8867513459481287).epsilon(1e-14));
    }

    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(rmse({1.0, 2.0}, {1.0}), ConfigError);
        CHECK_THROWS_AS(rmse({}, {}), ConfigError);
    }
}
