#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hyperion/metrics.hpp"
#include "hyperion/rng.hpp"

using namespace hyperion;

namespace {

Vec random_vec(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("sam_degrees") {
    Vec a(3), b(3);
    a << 1, 2, 3;
    b << 0, 0, 0;

    CHECK(sam_degrees(a, a) == doctest::Approx(0.0));
    CHECK(sam_degrees(a, 2.0 * a) == doctest::Approx(0.0));

    Vec x(2), y(2);
    x << 1, 0;
    y << 0, 1;
    CHECK(sam_degrees(x, y) == doctest::Approx(90.0));
    CHECK(sam_degrees(x, Vec(-x)) == doctest::Approx(180.0));

    CHECK_THROWS_AS(sam_degrees(a, b), SpecError);
    CHECK_THROWS_AS(sam_degrees(a, x), SpecError);

    SUBCASE("symmetric and scale invariant") {
        Rng rng(1);
        for (int t = 0; t < 50; ++t) {
            Vec u = random_vec(rng, 6), v = random_vec(rng, 6);
            if (u.norm() == 0 || v.norm() == 0) continue;
            CHECK(sam_degrees(u, v) == doctest::Approx(sam_degrees(v, u)));
            CHECK(sam_degrees(3.5 * u, v) ==
                  doctest::Approx(sam_degrees(u, v)).epsilon(1e-10));
        }
    }
}

TEST_CASE("rmse") {
    Vec a(4), b(4);
    a << 1, 2, 3, 4;
    b = a.array() + 0.25;

    CHECK(rmse(a, a) == doctest::Approx(0.0));
    CHECK(rmse(a, b) == doctest::Approx(0.25));
    CHECK_THROWS_AS(rmse(a, Vec::Ones(3)), SpecError);

    SUBCASE("matches the elementwise-loop oracle") {
        Rng rng(2);
        for (int t = 0; t < 20; ++t) {
            Vec u = random_vec(rng, 9), v = random_vec(rng, 9);
            double acc = 0;
            for (int i = 0; i < 9; ++i) acc += (u[i] - v[i]) * (u[i] - v[i]);
            CHECK(rmse(u, v) == doctest::Approx(std::sqrt(acc / 9)).epsilon(1e-12));
        }
    }

    SUBCASE("triangle inequality") {
        Rng rng(3);
        for (int t = 0; t < 50; ++t) {
            Vec u = random_vec(rng, 7), v = random_vec(rng, 7), w = random_vec(rng, 7);
            CHECK(rmse(u, w) <= rmse(u, v) + rmse(v, w) + 1e-12);
        }
    }
}

TEST_CASE("align_signatures") {
    Rng rng(4);
    Mat truth(10, 3);
    for (int i = 0; i < truth.size(); ++i) truth.data()[i] = rng.uniform(0.1, 5.0);

    SUBCASE("identity when est equals truth") {
        Alignment a = align_signatures(truth, truth);
        CHECK(a.permutation == std::vector<int>{0, 1, 2});
        CHECK(a.mean_sam == doctest::Approx(0.0));
        CHECK(a.mean_rmse == doctest::Approx(0.0));
    }

    SUBCASE("reversed columns found and matched") {
        Mat rev(10, 3);
        for (int j = 0; j < 3; ++j) rev.col(j) = truth.col(2 - j);
        Alignment a = align_signatures(rev, truth);
        CHECK(a.permutation == std::vector<int>{2, 1, 0});
        CHECK(a.mean_sam == doctest::Approx(0.0));
    }

    SUBCASE("column scaling does not change the matching") {
        Mat scaled = truth;
        scaled.col(0) *= 2.0;
        scaled.col(2) *= 0.3;
        Alignment a = align_signatures(scaled, truth);
        CHECK(a.permutation == std::vector<int>{0, 1, 2});
        CHECK(a.mean_sam == doctest::Approx(0.0));
    }

    SUBCASE("invariant under permutation of the estimate columns") {
        Mat est = truth;
        est.col(0) += 0.01 * random_vec(rng, 10).cwiseAbs();
        est.col(1) += 0.02 * random_vec(rng, 10).cwiseAbs();
        Alignment base = align_signatures(est, truth);
        Mat shuffled(10, 3);
        shuffled.col(0) = est.col(1);
        shuffled.col(1) = est.col(2);
        shuffled.col(2) = est.col(0);
        Alignment again = align_signatures(shuffled, truth);
        CHECK(again.mean_sam == doctest::Approx(base.mean_sam));
        CHECK(again.mean_rmse == doctest::Approx(base.mean_rmse));
    }

    SUBCASE("shape errors") {
        CHECK_THROWS_AS(align_signatures(truth.leftCols(2), truth), SpecError);
        CHECK_THROWS_AS(align_signatures(truth.topRows(5), truth), SpecError);
        CHECK_THROWS_AS(align_signatures(Mat::Ones(4, 9), Mat::Ones(4, 9)),
                        SpecError);
    }
}

TEST_CASE("snr_db") {
    CHECK(snr_db(2.0, 1.0) == doctest::Approx(0.0));
    CHECK(snr_db(11.0, 1.0) == doctest::Approx(10.0));
    CHECK_THROWS_AS(snr_db(1.0, 1.0), SpecError);
    CHECK_THROWS_AS(snr_db(2.0, 0.0), SpecError);
}

TEST_CASE("pca_project_2d") {
    Rng rng(5);
    Mat pures(12, 3);
    for (int i = 0; i < pures.size(); ++i) pures.data()[i] = rng.uniform(0.0, 3.0);

    SUBCASE("three affinely independent columns form a nondegenerate triangle") {
        Mat img = pca_project_2d(pures, {0, 1, 2});
        Mat E(2, 2);
        E.col(0) = img.col(1) - img.col(0);
        E.col(1) = img.col(2) - img.col(0);
        CHECK(std::abs(E.determinant()) > 1e-8);
    }

    SUBCASE("5:5 mixture lands at the midpoint of its pures") {
        Mat X(12, 4);
        X.leftCols(3) = pures;
        X.col(3) = 0.5 * (pures.col(0) + pures.col(1));
        Mat img = pca_project_2d(X, {0, 1, 2});
        Vec mid = 0.5 * (img.col(0) + img.col(1));
        CHECK((img.col(3) - mid).norm() < 1e-9);
    }

    SUBCASE("duplicate columns share an image") {
        Mat X(12, 4);
        X.leftCols(3) = pures;
        X.col(3) = pures.col(1);
        Mat img = pca_project_2d(X, {0, 1, 2});
        CHECK((img.col(3) - img.col(1)).norm() < 1e-12);
    }

    SUBCASE("fewer than 3 fit columns rejected") {
        CHECK_THROWS_AS(pca_project_2d(pures, {0, 1}), SpecError);
    }
}
