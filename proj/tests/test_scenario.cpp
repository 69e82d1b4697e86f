#include <gtest/gtest.h>

#include "support.hpp"

using namespace isacfp;

TEST(Pathloss, Formula) {
    EXPECT_NEAR(pathloss_db(1.0, 0.0), 15.3, 1e-12);
    EXPECT_NEAR(pathloss_db(100.0, 0.0), 90.5, 1e-12);
    EXPECT_NEAR(pathloss_db(100.0, 8.0), 98.5, 1e-12);
    EXPECT_THROW(pathloss_db(0.0, 0.0), std::domain_error);
    EXPECT_THROW(pathloss_db(-3.0, 0.0), std::domain_error);
}

TEST(Steering, Examples) {
    const CVec a0 = steering_vector(0.0, 4);
    for (int m = 0; m < 4; ++m) EXPECT_NEAR(std::abs(a0(m) - 1.0), 0.0, 1e-15);
    const CVec a1 = steering_vector(kPi / 2, 2);
    EXPECT_NEAR(std::abs(a1(1) - cplx(-1.0, 0.0)), 0.0, 1e-15);
    const CVec a2 = steering_vector(kPi / 6, 2);
    EXPECT_NEAR(std::abs(a2(1) - cplx(0.0, -1.0)), 0.0, 1e-15);
    EXPECT_THROW(steering_vector(0.1, 0), std::domain_error);
}

TEST(Steering, UnitModulusEntries) {
    Rng rng = make_stream(4, 0, StreamTag::scenario);
    for (int t = 0; t < 20; ++t) {
        const CVec a = steering_vector(uniform(rng, -kPi / 2, kPi / 2), 9);
        for (Eigen::Index m = 0; m < a.size(); ++m) EXPECT_NEAR(std::abs(a(m)), 1.0, 1e-14);
    }
}

TEST(Steering, DerivativeExamples) {
    EXPECT_EQ(steering_derivative(0.7, 3)(0), cplx(0.0, 0.0));
    const CVec d = steering_derivative(kPi / 2, 2);
    EXPECT_LT(d.norm(), 1e-15);
    const CVec d0 = steering_derivative(0.0, 2);
    EXPECT_NEAR(std::abs(d0(1) - cplx(0.0, -kPi)), 0.0, 1e-14);
    const double h = 1e-6;
    const CVec fd = (steering_vector(h, 2) - steering_vector(-h, 2)) / (2 * h);
    EXPECT_LT((fd - d0).norm(), 1e-6 * d0.norm());
    EXPECT_THROW(steering_derivative(0.1, 0), std::domain_error);
}

TEST(Response, ScalarAndZero) {
    const auto r = build_response(0.5, 0.3, 1, 1);
    EXPECT_NEAR(std::abs(r.G(0, 0) - 0.5), 0.0, 1e-15);
    EXPECT_EQ(r.Gdot(0, 0), cplx(0.0, 0.0));
    const auto z = build_response(0.0, 0.3, 3, 4);
    EXPECT_EQ(z.G.norm(), 0.0);
    EXPECT_EQ(z.Gdot.norm(), 0.0);
    EXPECT_THROW(build_response(-1.0, 0.3, 2, 2), std::domain_error);
}

TEST(Response, RankOneAndDerivativeMatchesFiniteDifference) {
    Rng rng = make_stream(5, 0, StreamTag::scenario);
    const double h = 1e-6;
    for (int t = 0; t < 50; ++t) {
        const double theta = uniform(rng, -1.4, 1.4);
        const auto r = build_response(1e-3, theta, 4, 6);
        const auto sv = Eigen::JacobiSVD<CMat>(r.G).singularValues();
        EXPECT_LT(sv(1) / sv(0), 1e-10);
        const CMat fd = (build_response(1e-3, theta + h, 4, 6).G - build_response(1e-3, theta - h, 4, 6).G) / (2 * h);
        EXPECT_LT((fd - r.Gdot).norm(), 1e-6 * r.Gdot.norm());
    }
}

TEST(Topology, SevenCellLayout) {
    NetworkConfig cfg = uniform_config(7, 3, 4, 4, 2, 2);
    Rng rng = make_stream(1, 0, StreamTag::topology);
    const auto topo = build_topology(cfg, rng);
    ASSERT_EQ(topo.bs_positions.size(), 7u);
    EXPECT_EQ(topo.bs_positions[0], Vec2(0.0, 0.0));
    for (int b = 1; b < 7; ++b) EXPECT_NEAR(topo.bs_positions[static_cast<std::size_t>(b)].norm(), 800.0, 1e-9);
    ASSERT_EQ(topo.user_positions.size(), 21u);
    for (int l = 0; l < 7; ++l)
        for (int k = 0; k < 3; ++k) {
            const double r = (topo.user(l, k) - topo.bs_positions[static_cast<std::size_t>(l)]).norm();
            EXPECT_GE(r, 0.8 * 400.0 - 1e-9);
            EXPECT_LE(r, 400.0 + 1e-9);
        }
}

TEST(Topology, SingleCell) {
    NetworkConfig cfg = uniform_config(1, 4, 4, 4, 2, 2);
    Rng rng = make_stream(1, 0, StreamTag::topology);
    const auto topo = build_topology(cfg, rng);
    ASSERT_EQ(topo.bs_positions.size(), 1u);
    for (const auto& u : topo.user_positions) EXPECT_LE(u.norm(), 400.0 + 1e-9);
}

TEST(Topology, Deterministic) {
    NetworkConfig cfg = uniform_config(7, 2, 4, 4, 2, 2);
    Rng a = make_stream(3, 0, StreamTag::topology), b = make_stream(3, 0, StreamTag::topology);
    const auto ta = build_topology(cfg, a), tb = build_topology(cfg, b);
    EXPECT_EQ(ta.user_positions, tb.user_positions);
    EXPECT_EQ(ta.bs_positions, tb.bs_positions);
}

TEST(Topology, WrapAroundSymmetry) {
    // rotating the outer ring by 60 degrees permutes the pairwise wrap distances
    NetworkConfig cfg = uniform_config(7, 1, 4, 4, 2, 2);
    Rng rng = make_stream(1, 0, StreamTag::topology);
    const auto topo = build_topology(cfg, rng);
    auto dist = [&](int a, int b) { return topo.wrap_distance(topo.bs_positions[static_cast<std::size_t>(a)], b); };
    auto rot = [](int b) { return b == 0 ? 0 : 1 + (b % 6); };
    for (int a = 0; a < 7; ++a)
        for (int b = 0; b < 7; ++b) EXPECT_NEAR(dist(a, b), dist(rot(a), rot(b)), 1e-6);
    // with wrap-around every BS sees the other six at one spacing
    for (int a = 0; a < 7; ++a)
        for (int b = 0; b < 7; ++b)
            if (a != b) {
                EXPECT_NEAR(dist(a, b), 800.0, 1e-6);
            }
}

TEST(Topology, InvalidCellCount) {
    NetworkConfig cfg = uniform_config(8, 1, 4, 4, 2, 2);
    EXPECT_THROW(cfg.validate(), ConfigError);
    NetworkConfig bad = uniform_config(1, 1, 4, 4, 2, 3);
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Channels, ShapesAndDeterminism) {
    NetworkConfig cfg = uniform_config(2, 3, 8, 5, 4, 2);
    const auto a = make_scenario(cfg), b = make_scenario(cfg);
    ASSERT_EQ(a.ch.H.size(), 12u);
    for (const auto& h : a.ch.H) {
        EXPECT_EQ(h.rows(), 4);
        EXPECT_EQ(h.cols(), 8);
    }
    EXPECT_EQ(a.ch.gcross(0, 1).rows(), 5);
    EXPECT_EQ(a.ch.gcross(0, 1).cols(), 8);
    EXPECT_EQ(a.ch.Gresp[1].rows(), 5);
    for (std::size_t i = 0; i < a.ch.H.size(); ++i) EXPECT_EQ(a.ch.H[i], b.ch.H[i]);
    EXPECT_EQ(a.ch.theta_rough, b.ch.theta_rough);
}

TEST(Channels, EntryPowerMatchesPathlossGain) {
    NetworkConfig cfg = uniform_config(1, 1, 500, 1, 200, 1);
    cfg.shadowing_std_db = 0.0;
    const auto sc = make_scenario(cfg);
    const double d = sc.topo.wrap_distance(sc.topo.user(0, 0), 0);
    const double gain = std::pow(10.0, -pathloss_db(d, 0.0) / 10.0);
    const CMat& h = sc.ch.h(0, 0, 0);
    EXPECT_EQ(h.size(), 100000);
    EXPECT_NEAR(h.squaredNorm() / static_cast<double>(h.size()) / gain, 1.0, 0.05);
}

TEST(Channels, RoughDoaWithinPrior) {
    NetworkConfig cfg = uniform_config(7, 1, 4, 4, 2, 2);
    const auto sc = make_scenario(cfg);
    for (int l = 0; l < 7; ++l) {
        const auto li = static_cast<std::size_t>(l);
        EXPECT_LE(std::abs(sc.ch.theta_rough[li] - sc.ch.theta_true[li]), 0.05);
        EXPECT_GE(sc.ch.theta_true[li], -kPi / 2);
        EXPECT_LE(sc.ch.theta_true[li], kPi / 2);
    }
}

TEST(Channels, PositionsCsv) {
    NetworkConfig cfg = uniform_config(7, 2, 4, 4, 2, 2);
    const auto sc = make_scenario(cfg);
    std::ostringstream os;
    write_positions_csv(sc.topo, os);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("entity,type,x_m,y_m\n", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 7 + 14 + 1);
}
