#include <doctest.h>

#include <cmath>
#include <random>

#include "tempdiff/losses.hpp"

using namespace tempdiff;

namespace {

// Independent arithmetic route for the ranking loss, written without max().
double mr_reference(double p_g, double p_og, double p_w, double p_ow,
                    double eps) {
    double first = eps + p_og - p_g;
    if (first < 0.0) first = 0.0;
    double second = eps + p_w - p_ow;
    if (second < 0.0) second = 0.0;
    return first + second;
}

}  // namespace

TEST_CASE("ranking loss on worked examples") {
    CHECK(mr_loss({0.7, 0.5, 0.4, 0.6}, 0.1) == doctest::Approx(0.0));
    CHECK(mr_loss({0.5, 0.5, 0.5, 0.5}, 0.1) == doctest::Approx(0.2));
    CHECK(mr_loss({0.55, 0.5, 0.62, 0.6}, 0.1) == doctest::Approx(0.17));
}

TEST_CASE("ranking loss matches the reference arithmetic on random input") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        RankQuadruple q{unit(rng), unit(rng), unit(rng), unit(rng)};
        double expected = mr_reference(q.p_g, q.p_og, q.p_w, q.p_ow, 0.1);
        CHECK(std::fabs(mr_loss(q, 0.1) - expected) <= 1e-9);
        CHECK(mr_loss(q, 0.1) >= 0.0);
    }
}

TEST_CASE("ranking loss is zero exactly when both margins hold") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double eps = 0.1;
    for (int i = 0; i < 500; ++i) {
        RankQuadruple q{unit(rng), unit(rng), unit(rng), unit(rng)};
        bool margins = q.p_g >= q.p_og + eps && q.p_ow >= q.p_w + eps;
        CHECK((mr_loss(q, eps) == 0.0) == margins);
    }
}

TEST_CASE("ranking loss gradient matches central differences") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double eps = 0.1;
    const double h = 1e-5;
    int accepted = 0;
    while (accepted < 100) {
        RankQuadruple q{unit(rng), unit(rng), unit(rng), unit(rng)};
        // Stay away from the hinge kinks.
        if (std::fabs(eps + q.p_og - q.p_g) < 1e-3) continue;
        if (std::fabs(eps + q.p_w - q.p_ow) < 1e-3) continue;
        ++accepted;

        auto grad = mr_loss_grad(q, eps);
        double* fields[4] = {&q.p_g, &q.p_og, &q.p_w, &q.p_ow};
        for (int k = 0; k < 4; ++k) {
            double orig = *fields[k];
            *fields[k] = orig + h;
            double up = mr_loss(q, eps);
            *fields[k] = orig - h;
            double down = mr_loss(q, eps);
            *fields[k] = orig;
            double numeric = (up - down) / (2.0 * h);
            CHECK(std::fabs(grad[k] - numeric) <= 1e-6);
        }
    }
}

TEST_CASE("aggregated loss") {
    CHECK(joint_loss(0.3, 0.17, 10.0) == doctest::Approx(3.17));
    CHECK(joint_loss(0.0, 0.0, 10.0) == doctest::Approx(0.0));
    CHECK(joint_loss(0.0, 0.0, 3.5) == doctest::Approx(0.0));
}

TEST_CASE("aggregated loss is monotone in each argument") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        double ce = unit(rng), mr = unit(rng), alpha = unit(rng) * 10.0;
        double base = joint_loss(ce, mr, alpha);
        CHECK(joint_loss(ce + 0.1, mr, alpha) >= base);
        CHECK(joint_loss(ce, mr + 0.1, alpha) >= base);
    }
}

TEST_CASE("cross-entropy on hand-worked cases") {
    // Model puts probability 1 on every target token.
    std::vector<std::vector<std::vector<double>>> perfect = {
        {{0.0, 1.0}, {1.0, 0.0}}};
    std::vector<std::vector<int>> targets = {{1, 0}};
    CHECK(ce_loss(perfect, targets) == doctest::Approx(0.0));

    // Uniform over a 2-token vocabulary, 1-token target.
    std::vector<std::vector<std::vector<double>>> uniform = {{{0.5, 0.5}}};
    CHECK(ce_loss(uniform, {{0}}) == doctest::Approx(std::log(2.0)));

    // Fixed synthetic distributions against hand-computed NLL.
    std::vector<std::vector<std::vector<double>>> synthetic = {
        {{0.2, 0.3, 0.5}, {0.6, 0.3, 0.1}},
        {{0.25, 0.25, 0.5}},
    };
    std::vector<std::vector<int>> ids = {{2, 0}, {1}};
    double expected =
        ((-std::log(0.5) - std::log(0.6)) + (-std::log(0.25))) / 2.0;
    CHECK(std::fabs(ce_loss(synthetic, ids) - expected) <= 1e-9);
}

TEST_CASE("cross-entropy rejects mismatched shapes") {
    std::vector<std::vector<std::vector<double>>> outputs = {{{0.5, 0.5}}};
    CHECK_THROWS(ce_loss(outputs, {{0}, {1}}));
    CHECK_THROWS(ce_loss(outputs, {{0, 1}}));
}

TEST_CASE("explanation pair loss") {
    CHECK(explanation_pair_loss(0.5, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK(explanation_pair_loss(2.0, 0.0) ==
          doctest::Approx(std::log1p(std::exp(-2.0))));
    CHECK(explanation_pair_loss(2.0, 0.0) == doctest::Approx(0.126928).epsilon(1e-4));
}

TEST_CASE("explanation pair loss gradient matches central differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        double p = unit(rng), n = unit(rng);
        auto grad = explanation_pair_loss_grad(p, n);
        double dp = (explanation_pair_loss(p + h, n) -
                     explanation_pair_loss(p - h, n)) / (2.0 * h);
        double dn = (explanation_pair_loss(p, n + h) -
                     explanation_pair_loss(p, n - h)) / (2.0 * h);
        CHECK(grad[0] == doctest::Approx(dp).epsilon(1e-5));
        CHECK(grad[1] == doctest::Approx(dn).epsilon(1e-5));
    }
}

TEST_CASE("rank quadruple validates its range") {
    CHECK_NOTHROW(RankQuadruple{0.1, 0.2, 0.3, 0.4}.validate());
    CHECK_THROWS(RankQuadruple{1.2, 0.0, 0.0, 0.0}.validate());
}
