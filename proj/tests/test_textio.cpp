#include "helpers.hpp"

#include <sstream>

#include "craterid/textio.hpp"

using namespace craterid;

TEST_CASE("key values") {
    std::istringstream in("# c\n a = 1.5 \nname=local # trailing\n\nflag = yes\nbig = inf\n");
    const KeyValues kv = parse_kv(in);
    CHECK(kv_double(kv, "a", 0) == 1.5);
    CHECK(kv_string(kv, "name", "") == "local");
    CHECK(kv_bool(kv, "flag", false));
    CHECK(std::isinf(kv_double(kv, "big", 0)));
    CHECK(kv_int(kv, "missing", 4) == 4);
    std::istringstream bad("novalue\n");
    CHECK_THROWS_AS(parse_kv(bad), Error);
    CHECK_THROWS_AS(kv_double(kv, "name", 0), Error);
}

TEST_CASE("camera config") {
    std::istringstream a("fov_deg = 90\nrows = 100\ncols = 200\n");
    Camera c = camera_from_kv(parse_kv(a));
    CHECK(c.k.dx == doctest::Approx(100));
    CHECK(c.rows == 100);
    CHECK(c.cols == 200);
    std::ostringstream out;
    write_camera(out, c);
    std::istringstream back(out.str());
    const Camera d = camera_from_kv(parse_kv(back));
    CHECK(d.k.dx == c.k.dx);
    CHECK(d.k.up == c.k.up);
    CHECK(d.rows == c.rows);
}

TEST_CASE("scale config") {
    std::istringstream in("scale = regional\nconvention = sorted\nk = 4\nwhiten = true\n");
    const IndexScale s = scale_from_kv(parse_kv(in));
    CHECK(s.name == "regional");
    CHECK(s.k == 4);
    CHECK(s.convention == Convention::sorted);
    CHECK(s.kind == DescriptorKind::noncoplanar3);
    CHECK(s.whiten);
    std::istringstream bad("scale = local\nd_min = 50\n");
    CHECK_THROWS_AS(scale_from_kv(parse_kv(bad)), Error);
}

TEST_CASE("detections") {
    std::istringstream in("u_c,v_c,a_px,b_px,psi_rad\n# x\n10,20,5,4,0.5\n1e2, 3, 2, 2, 0\n");
    const auto d = parse_detections(in);
    REQUIRE(d.size() == 2);
    CHECK(d[0].xc == 10);
    CHECK(d[0].b == 4);
    CHECK(d[1].xc == 100);
    std::ostringstream out;
    write_detections(out, d);
    std::istringstream back(out.str());
    const auto e = parse_detections(back);
    REQUIRE(e.size() == 2);
    CHECK(e[0].psi == d[0].psi);
    CHECK(e[1].a == d[1].a);
    std::istringstream bad("1,2,3,4\n");
    CHECK_THROWS_AS(parse_detections(bad), Error);
    std::istringstream axes("1,2,3,4,0\n");
    CHECK_THROWS_AS(parse_detections(axes), Error);
}

TEST_CASE("attitude") {
    const Mat3 id = parse_attitude("0 0 0 1");
    CHECK(th::rel(id, Mat3::Identity()) < 1e-15);
    // 90 degrees about z, scalar last
    const Mat3 q = parse_attitude(std::to_string(0.0) + "," + "0," + std::to_string(std::sqrt(0.5)) + "," +
                                  std::to_string(std::sqrt(0.5)));
    const Mat3 want = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()).toRotationMatrix();
    CHECK(th::rel(q, want) < 1e-6);
    const Mat3 T = nadir_attitude(Vec3(1000, 2000, -500));
    const Mat3 back = parse_attitude(format_attitude(T));
    CHECK(th::rel(back, T) < 1e-15);
    CHECK_THROWS_AS(parse_attitude("1 2 3"), Error);
    CHECK_THROWS_AS(parse_attitude("1 0 0 0 1 0 0 0 2"), Error);
}
