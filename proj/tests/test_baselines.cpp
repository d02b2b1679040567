#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "squats/baselines.hpp"

using namespace squats;
using Catch::Approx;

TEST_CASE("direct scalar baseline") {
    SECTION("rates below one bit are infeasible") {
        SparseSignal s;
        s.values.assign(10, 0.0);
        REQUIRE_THROWS_AS(direct_quantize(s, 0.9), InfeasibleError);
    }
    SECTION("zero signal has the zero-cell penalty per sample") {
        SparseSignal s;
        s.values.assign(100, 0.0);
        const auto rec = direct_quantize(s, 1.0, true);
        // centroid of [0, inf) under the standard Gaussian: sqrt(2/pi)
        const double c = std::sqrt(2.0 / M_PI);
        for (double v : rec) REQUIRE(v == Approx(c));
        REQUIRE(mse(s.values, rec) == Approx(c * c));
        const auto rec_mid = direct_quantize(s, 1.0, false);
        for (double v : rec_mid) REQUIRE(v == Approx(1.0));
    }
    SECTION("high rate drives the midpoint MSE below 1e-6 in support") {
        Rng rng(5);
        SparseSignal s = gen_signal(200, 200, rng);
        for (double& v : s.values) {
            while (v != 0.0 && std::abs(v) > 2.0) v = rng.normal();
            if (v == 0.0) v = 0.5;
        }
        const auto rec = direct_quantize(s, 16.0, false);
        REQUIRE(mse(s.values, rec) < 1e-6);
    }
}

TEST_CASE("cs_encode") {
    Rng rng(9);
    const int T = 100, m = 18;
    const Eigen::MatrixXd A = gaussian_sensing(m, T, rng);

    SECTION("zero signal maps every measurement to the zero-containing cell") {
        const Eigen::VectorXd s = Eigen::VectorXd::Zero(T);
        const auto enc = cs_encode(s, A, 100);
        PlainQuantizer q(enc.levels, -2.0, 2.0, false);
        for (int i = 0; i < m; ++i) REQUIRE(enc.y[i] == q.quantize_value(0.0));
    }
    SECTION("bit accounting never exceeds the budget") {
        const Eigen::VectorXd s = Eigen::VectorXd::Random(T);
        for (int64_t budget : {18, 36, 54, 100, 1000}) {
            const auto enc = cs_encode(s, A, budget);
            REQUIRE(enc.bits_used <= budget);
            REQUIRE(enc.levels == (1 << std::min<int64_t>(budget / m, 16)));
        }
    }
    SECTION("budget below one bit per measurement is infeasible") {
        const Eigen::VectorXd s = Eigen::VectorXd::Zero(T);
        REQUIRE_THROWS_AS(cs_encode(s, A, m - 1), InfeasibleError);
    }
    SECTION("Gaussian sensing columns concentrate near sqrt(m)") {
        Rng r2(10);
        const Eigen::MatrixXd big = gaussian_sensing(400, 50, r2);
        for (int c = 0; c < 50; ++c)
            REQUIRE(big.col(c).norm() == Approx(20.0).epsilon(0.25));
    }
}

TEST_CASE("QIHT") {
    SECTION("k = 0 returns the zero vector immediately") {
        Rng rng(1);
        const Eigen::MatrixXd A = gaussian_sensing(10, 20, rng);
        CsEncoded enc;
        enc.y = Eigen::VectorXd::Ones(10);
        enc.levels = 4;
        const auto res = qiht_recover(enc, A, 0);
        REQUIRE(res.x.isZero());
    }
    SECTION("iterates are exactly k-sparse") {
        Rng rng(2);
        const int T = 60, k = 4;
        const Eigen::MatrixXd A = gaussian_sensing(30, T, rng);
        SparseSignal s = gen_signal(T, k, rng);
        Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(s.values.data(), T);
        const auto enc = cs_encode(sv, A, 30 * 8);
        const auto res = qiht_recover(enc, A, k, 50);
        int nz = 0;
        for (int i = 0; i < T; ++i) nz += res.x[i] != 0.0;
        REQUIRE(nz <= k);
    }
    SECTION("near-unquantized measurements give frequent support recovery") {
        // values scaled so the projections stay inside the measurement
        // quantizer's [-2, 2] support: this is the unquantized limit
        Rng rng(3);
        const int T = 100, k = 3, m = 60;
        int hits = 0;
        const int trials = 100;
        for (int t = 0; t < trials; ++t) {
            const Eigen::MatrixXd A = gaussian_sensing(m, T, rng);
            SparseSignal s = gen_signal(T, k, rng);
            for (double& v : s.values)
                if (v != 0.0) v = (v < 0.0 ? -1.0 : 1.0) * (0.1 + 0.15 * rng.uniform());
            Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(s.values.data(), T);
            const auto enc = cs_encode(sv, A, static_cast<int64_t>(m) * 16);
            const auto res = qiht_recover(enc, A, k, 300);
            bool ok = true;
            for (int i = 0; i < T; ++i) {
                const bool truth = s.values[i] != 0.0;
                const bool found = res.x[i] != 0.0;
                ok &= truth == found;
            }
            hits += ok;
        }
        REQUIRE(hits >= 95);
    }
}

TEST_CASE("FISTA") {
    Rng rng(4);
    const int T = 30, m = 40;
    const Eigen::MatrixXd A = gaussian_sensing(m, T, rng);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(T);
    x0[3] = 1.2;
    x0[17] = -0.7;
    const Eigen::VectorXd y = A * x0;

    SECTION("huge lambda gives the zero vector") {
        const Eigen::VectorXd x = fista_recover(y, A, 1e9, 100);
        REQUIRE(x.isZero());
    }
    SECTION("lambda = 0 with full column rank recovers least squares") {
        const Eigen::VectorXd x = fista_recover(y, A, 0.0, 4000);
        const Eigen::VectorXd ls =
            (A.transpose() * A).ldlt().solve(A.transpose() * y);
        REQUIRE((x - ls).norm() < 1e-6 * std::max(1.0, ls.norm()));
    }
    SECTION("objective trace never increases") {
        std::vector<double> trace;
        (void)fista_recover(y, A, 0.5, 300, &trace);
        for (size_t i = 1; i < trace.size(); ++i)
            REQUIRE(trace[i] <= trace[i - 1] + 1e-9 * std::abs(trace[i - 1]) + 1e-12);
    }
    SECTION("moderate lambda approximately recovers the sparse vector") {
        const Eigen::VectorXd x = fista_recover(y, A, 0.05, 2000);
        REQUIRE((x - x0).norm() < 0.15 * x0.norm());
    }
}

TEST_CASE("block sensing stacks per-signal matrices") {
    Rng rng(6);
    BlockSensing bs;
    bs.blocks.push_back(gaussian_sensing(3, 5, rng));
    bs.blocks.push_back(gaussian_sensing(2, 4, rng));
    REQUIRE(bs.rows() == 5);
    REQUIRE(bs.cols() == 9);
    const Eigen::MatrixXd D = bs.dense();
    REQUIRE(D.rows() == 5);
    REQUIRE(D.cols() == 9);
    REQUIRE(D.block(0, 0, 3, 5) == bs.blocks[0]);
    REQUIRE(D.block(3, 5, 2, 4) == bs.blocks[1]);
    REQUIRE(D.block(0, 5, 3, 4).isZero());
    REQUIRE(D.block(3, 0, 2, 5).isZero());
}

TEST_CASE("spectral norm agrees with Eigen SVD") {
    Rng rng(8);
    const Eigen::MatrixXd A = gaussian_sensing(12, 20, rng);
    const double svd = A.jacobiSvd().singularValues()[0];
    REQUIRE(spectral_norm_sq(A) == Approx(svd * svd).epsilon(1e-6));
}
