#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raci/geom.hpp"
#include "raci/rng.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>

using namespace raci;
using namespace raci::geom;

namespace {

RelativePose random_pose(std::mt19937_64& rng, double tmag = 1.0, double amag = 0.5) {
    std::uniform_real_distribution<double> t(-tmag, tmag), a(-amag, amag);
    return {t(rng), t(rng), t(rng), a(rng), a(rng), a(rng)};
}

}  // namespace

TEST_CASE("euler_to_rotation identity and quarter turn") {
    CHECK((euler_to_rotation(0, 0, 0) - Eigen::Matrix3d::Identity()).norm() == 0.0);
    Eigen::Matrix3d expect;
    expect << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK((euler_to_rotation(0, 0, M_PI / 2) - expect).norm() < 1e-15);
}

TEST_CASE("euler_to_rotation matches the product of three axis rotations") {
    const double r = 0.1, p = 0.2, y = 0.3;
    Eigen::Matrix3d Rx, Ry, Rz;
    Rx << 1, 0, 0, 0, std::cos(r), -std::sin(r), 0, std::sin(r), std::cos(r);
    Ry << std::cos(p), 0, std::sin(p), 0, 1, 0, -std::sin(p), 0, std::cos(p);
    Rz << std::cos(y), -std::sin(y), 0, std::sin(y), std::cos(y), 0, 0, 0, 1;
    Eigen::Matrix3d oracle = Rz * Ry * Rx;
    CHECK((euler_to_rotation(r, p, y) - oracle).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("euler_to_rotation rejects non-finite input") {
    CHECK_THROWS_AS(euler_to_rotation(std::nan(""), 0, 0), std::invalid_argument);
}

TEST_CASE("euler_to_rotation is always orthonormal with det 1") {
    auto rng = named_stream(7, "geom/orthonormal");
    std::uniform_real_distribution<double> a(-M_PI, M_PI);
    for (int i = 0; i < 200; ++i) {
        Eigen::Matrix3d R = euler_to_rotation(a(rng), a(rng), a(rng));
        CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation_to_euler round trips") {
    auto e = rotation_to_euler(Eigen::Matrix3d::Identity());
    CHECK(e.droll == 0.0);
    CHECK(e.dpitch == 0.0);
    CHECK(e.dyaw == 0.0);
    CHECK_FALSE(e.gimbal_lock);

    e = rotation_to_euler(euler_to_rotation(0.1, 0.2, 0.3));
    CHECK(e.droll == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(e.dpitch == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(e.dyaw == doctest::Approx(0.3).epsilon(1e-12));

    auto rng = named_stream(8, "geom/roundtrip");
    std::uniform_real_distribution<double> a(-M_PI + 1e-6, M_PI);
    std::uniform_real_distribution<double> pitch(-M_PI / 2 + 1e-3, M_PI / 2 - 1e-3);
    for (int i = 0; i < 200; ++i) {
        Eigen::Matrix3d R = euler_to_rotation(a(rng), pitch(rng), a(rng));
        auto eu = rotation_to_euler(R);
        CHECK_FALSE(eu.gimbal_lock);
        CHECK((euler_to_rotation(eu.droll, eu.dpitch, eu.dyaw) - R).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("rotation_to_euler flags gimbal lock") {
    auto e = rotation_to_euler(euler_to_rotation(0.0, M_PI / 2, 0.4));
    CHECK(e.gimbal_lock);
    CHECK(e.droll == 0.0);
    CHECK(e.dyaw == doctest::Approx(0.4).epsilon(1e-9));
    // dyaw - droll convention at +pi/2.
    e = rotation_to_euler(euler_to_rotation(0.1, M_PI / 2, 0.4));
    CHECK(e.gimbal_lock);
    CHECK(e.dyaw == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("rotation_to_euler rejects non-orthonormal input") {
    Eigen::Matrix3d bad = 2.0 * Eigen::Matrix3d::Identity();
    CHECK_THROWS_AS(rotation_to_euler(bad), std::invalid_argument);
}

TEST_CASE("compose basics") {
    AbsolutePose id = AbsolutePose::identity();
    auto same = compose(id, RelativePose{});
    CHECK(same.translation.norm() == 0.0);
    CHECK((same.rotation - Eigen::Matrix3d::Identity()).norm() == 0.0);

    auto moved = compose(id, RelativePose{1, 0, 0, 0, 0, 0});
    CHECK((moved.translation - Eigen::Vector3d(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("square path closure") {
    AbsolutePose p = AbsolutePose::identity();
    for (int i = 0; i < 4; ++i) p = compose(p, RelativePose{1, 0, 0, 0, 0, M_PI / 2});
    CHECK(p.translation.norm() < 1e-9);
    CHECK((p.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("relative_between inverts compose") {
    auto zero = relative_between(AbsolutePose::identity(), AbsolutePose::identity());
    CHECK(zero.vec().norm() == 0.0);

    AbsolutePose shifted;
    shifted.translation = Eigen::Vector3d(0, 2, 0);
    auto rel = relative_between(AbsolutePose::identity(), shifted);
    CHECK(rel.dy == doctest::Approx(2.0));
    CHECK(rel.vec().tail<4>().norm() + std::abs(rel.dx) < 1e-15);

    auto rng = named_stream(9, "geom/inverse");
    for (int i = 0; i < 100; ++i) {
        AbsolutePose a = compose(AbsolutePose::identity(), random_pose(rng));
        RelativePose r = random_pose(rng);
        AbsolutePose b = compose(a, r);
        RelativePose rec = relative_between(a, b);
        CHECK((rec.vec() - r.vec()).cwiseAbs().maxCoeff() < 1e-9);
        AbsolutePose b2 = compose(a, rec);
        CHECK((b2.translation - b.translation).norm() < 1e-9);
        CHECK((b2.rotation - b.rotation).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("compose_trajectory arclength and shapes") {
    std::vector<RelativePose> rels(3, RelativePose{1, 0, 0, 0, 0, 0});
    auto traj = compose_trajectory(rels, {0, 1, 2, 3});
    REQUIRE(traj.poses.size() == 4);
    CHECK(traj.cumulative_arclength == std::vector<double>{0, 1, 2, 3});

    auto single = compose_trajectory({}, {0.0});
    CHECK(single.poses.size() == 1);

    CHECK_THROWS_AS(compose_trajectory(rels, {0, 1}), std::invalid_argument);
}

TEST_CASE("compose_trajectory round trips relative poses") {
    auto rng = named_stream(10, "geom/chain");
    std::vector<RelativePose> rels;
    std::vector<double> times{0.0};
    for (int i = 0; i < 50; ++i) {
        rels.push_back(random_pose(rng, 0.5, 0.3));
        times.push_back(times.back() + 0.1);
    }
    auto traj = compose_trajectory(rels, times);
    double arc = 0.0;
    for (std::size_t k = 0; k < rels.size(); ++k) {
        auto rec = relative_between(traj.poses[k], traj.poses[k + 1]);
        CHECK((rec.vec() - rels[k].vec()).cwiseAbs().maxCoeff() < 1e-9);
        arc += Eigen::Vector3d(rels[k].dx, rels[k].dy, rels[k].dz).norm();
    }
    CHECK(traj.cumulative_arclength.back() == arc);
}

TEST_CASE("prefix-suffix composition agrees with one pass") {
    auto rng = named_stream(11, "geom/assoc");
    std::vector<RelativePose> rels;
    for (int i = 0; i < 20; ++i) rels.push_back(random_pose(rng, 0.5, 0.3));
    AbsolutePose once = AbsolutePose::identity();
    for (const auto& r : rels) once = compose(once, r);

    AbsolutePose prefix = AbsolutePose::identity();
    for (int i = 0; i < 10; ++i) prefix = compose(prefix, rels[i]);
    AbsolutePose suffix_from_prefix = prefix;
    for (int i = 10; i < 20; ++i) suffix_from_prefix = compose(suffix_from_prefix, rels[i]);

    CHECK((once.translation - suffix_from_prefix.translation).norm() < 1e-9);
    CHECK((once.rotation - suffix_from_prefix.rotation).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trajectory export format") {
    auto traj = compose_trajectory({RelativePose{1, 0, 0, 0, 0, 0}}, {0.0, 0.5});
    std::ostringstream os;
    write_trajectory(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    std::istringstream first(line);
    double v;
    int count = 0;
    while (first >> v) ++count;
    CHECK(count == 13);  // timestamp + 3 translation + 9 rotation
    std::getline(is, line);
    CHECK(line.substr(0, 5) == "0.5 1");
}
