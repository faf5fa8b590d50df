#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "arfima/metrics.hpp"

using namespace arfima;

TEST_CASE("rmse hand-computed oracles") {
    std::vector<double> a{1, 2}, p{2, 4};
    CHECK_THAT(rmse(a, p), Catch::Matchers::WithinAbs(std::sqrt(2.5), 1e-12));

    std::vector<double> a2{0, 0, 0}, p2{3, 0, 0};
    CHECK_THAT(rmse(a2, p2), Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-12));

    CHECK(rmse(a, a) == 0.0);
}

TEST_CASE("rrmse hand-computed oracles") {
    std::vector<double> a{2}, p{1};
    CHECK(rrmse(a, p) == 0.5);
    CHECK(rrmse(a, a) == 0.0);
}

TEST_CASE("rrmse rejects zero actuals, rmse rejects mismatch/empty") {
    std::vector<double> z{1, 0, 2}, p{1, 1, 2};
    CHECK_THROWS(rrmse(z, p));
    std::vector<double> a{1, 2}, b{1};
    CHECK_THROWS(rmse(a, b));
    CHECK_THROWS(rrmse(a, b));
    CHECK_THROWS(rmse(std::vector<double>{}, std::vector<double>{}));
}

TEST_CASE("rmse symmetric, rrmse asymmetric") {
    std::vector<double> a{2}, p{1};
    CHECK(rmse(a, p) == rmse(p, a));
    CHECK(rrmse(a, p) == 0.5);
    CHECK(rrmse(p, a) == 1.0);
}

TEST_CASE("scale behavior on random inputs") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 10.0);
    std::vector<double> a(40), p(40), as(40), ps(40);
    double c = -3.7;
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng);
        p[i] = u(rng);
        as[i] = c * a[i];
        ps[i] = c * p[i];
    }
    CHECK_THAT(rmse(as, ps), Catch::Matchers::WithinRel(std::abs(c) * rmse(a, p), 1e-10));
    CHECK_THAT(rrmse(as, ps), Catch::Matchers::WithinRel(rrmse(a, p), 1e-10));
}

TEST_CASE("permutation invariance over paired indices") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.5, 10.0);
    std::vector<std::pair<double, double>> pairs(30);
    for (auto& pr : pairs) pr = {u(rng), u(rng)};
    auto unzip = [](const std::vector<std::pair<double, double>>& ps) {
        std::vector<double> a, b;
        for (auto& [x, y] : ps) {
            a.push_back(x);
            b.push_back(y);
        }
        return std::make_pair(a, b);
    };
    auto [a1, p1] = unzip(pairs);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    auto [a2, p2] = unzip(pairs);
    CHECK_THAT(rmse(a2, p2), Catch::Matchers::WithinRel(rmse(a1, p1), 1e-12));
    CHECK_THAT(rrmse(a2, p2), Catch::Matchers::WithinRel(rrmse(a1, p1), 1e-12));
}

TEST_CASE("worsening one prediction never decreases either metric") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.5, 10.0);
    std::vector<double> a(20), p(20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng);
        p[i] = u(rng);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto worse = p;
        worse[i] += (worse[i] >= a[i] ? 1.0 : -1.0);  // move further from actual
        CHECK(rmse(a, worse) >= rmse(a, p));
        CHECK(rrmse(a, worse) >= rrmse(a, p));
    }
}

TEST_CASE("report CSV has the fixed header") {
    EvaluationReport rep;
    rep.rows.push_back({"arma:0,1", "full", 0.5, 0.25, 24, "scale_by:1e+07", false, ""});
    auto csv = rep.to_csv();
    CHECK(csv.rfind("label,condition,rmse,rrmse,n,normalization\n", 0) == 0);
    CHECK(csv.find("\"arma:0,1\",full,") != std::string::npos);
}
