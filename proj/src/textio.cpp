#include "craterid/textio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "craterid/catalog.hpp"

namespace craterid {

namespace {

std::string strip_comment(const std::string& line) {
    const auto p = line.find('#');
    return trim(p == std::string::npos ? line : line.substr(0, p));
}

double to_double(const std::string& s, const std::string& what) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::schema_error, what + ": not a number '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorCode::schema_error, what + ": trailing text in '" + s + "'");
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

KeyValues parse_kv(std::istream& in) {
    KeyValues kv;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::string s = strip_comment(line);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::schema_error, "line " + std::to_string(no) + ": expected key = value");
        const std::string k = trim(s.substr(0, eq));
        if (k.empty()) throw Error(ErrorCode::schema_error, "line " + std::to_string(no) + ": empty key");
        kv[k] = trim(s.substr(eq + 1));
    }
    return kv;
}

KeyValues load_kv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot open " + path);
    return parse_kv(f);
}

std::string kv_string(const KeyValues& kv, const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

double kv_double(const KeyValues& kv, const std::string& key, double dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    if (it->second == "inf") return std::numeric_limits<double>::infinity();
    return to_double(it->second, key);
}

int kv_int(const KeyValues& kv, const std::string& key, int dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    const double v = to_double(it->second, key);
    if (v != std::floor(v)) throw Error(ErrorCode::schema_error, key + ": expected an integer");
    return int(v);
}

bool kv_bool(const KeyValues& kv, const std::string& key, bool dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::schema_error, key + ": expected a boolean");
}

Camera camera_from_kv(const KeyValues& kv) {
    const int rows = kv_int(kv, "rows", 2200);
    const int cols = kv_int(kv, "cols", rows);
    if (rows <= 0 || cols <= 0) throw Error(ErrorCode::invalid_argument, "image size must be positive");
    if (kv.count("dx")) {
        Camera c;
        c.rows = rows;
        c.cols = cols;
        c.k.dx = kv_double(kv, "dx", 1.0);
        c.k.dy = kv_double(kv, "dy", c.k.dx);
        c.k.skew = kv_double(kv, "skew", 0.0);
        c.k.up = kv_double(kv, "up", 0.5 * (cols - 1));
        c.k.vp = kv_double(kv, "vp", 0.5 * (rows - 1));
        if (!(c.k.dx > 0.0) || !(c.k.dy > 0.0)) throw Error(ErrorCode::invalid_argument, "focal lengths must be positive");
        return c;
    }
    const double fov = kv_double(kv, "fov_deg", 73.7);
    if (!(fov > 0.0 && fov < 180.0)) throw Error(ErrorCode::invalid_argument, "fov_deg outside (0, 180)");
    return camera_from_fov(fov, rows, cols);
}

void write_camera(std::ostream& out, const Camera& cam) {
    out << std::setprecision(17);
    out << "rows = " << cam.rows << "\ncols = " << cam.cols << "\ndx = " << cam.k.dx << "\ndy = " << cam.k.dy
        << "\nskew = " << cam.k.skew << "\nup = " << cam.k.up << "\nvp = " << cam.k.vp << "\n";
}

IndexScale scale_from_kv(const KeyValues& kv) {
    IndexScale s = scale_by_name(kv_string(kv, "scale", "local"));
    s.name = kv_string(kv, "name", s.name);
    s.k = kv_int(kv, "k", s.k);
    s.d_min = kv_double(kv, "d_min", s.d_min);
    s.d_max = kv_double(kv, "d_max", s.d_max);
    s.max_ellipticity = kv_double(kv, "max_ellipticity", s.max_ellipticity);
    s.min_arc_fraction = kv_double(kv, "min_arc_fraction", s.min_arc_fraction);
    if (kv.count("kind")) {
        const std::string k = kv.at("kind");
        if (k == "coplanar7")
            s.kind = DescriptorKind::coplanar7;
        else if (k == "noncoplanar3")
            s.kind = DescriptorKind::noncoplanar3;
        else
            throw Error(ErrorCode::schema_error, "kind must be coplanar7 or noncoplanar3");
    }
    if (kv.count("convention")) {
        const std::string c = kv.at("convention");
        if (c == "ordered")
            s.convention = Convention::ordered;
        else if (c == "sorted")
            s.convention = Convention::sorted;
        else if (c == "p2")
            s.convention = Convention::p2;
        else if (c == "p2_nine")
            s.convention = Convention::p2_nine;
        else
            throw Error(ErrorCode::schema_error, "unknown convention '" + c + "'");
    }
    s.whiten = kv_bool(kv, "whiten", s.whiten);
    s.moon_radius = kv_double(kv, "moon_radius", s.moon_radius);
    s.separation_margin = kv_double(kv, "separation_margin", s.separation_margin);
    s.canonical_altitude = kv_double(kv, "canonical_altitude", s.canonical_altitude);
    validate_scale(s);
    return s;
}

std::vector<EllipseParams> parse_detections(std::istream& in) {
    std::vector<EllipseParams> out;
    std::string line;
    int no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++no;
        const std::string s = strip_comment(line);
        if (s.empty()) continue;
        const auto f = split_csv_line(s);
        if (first && !f.empty() && trim(f[0]) == "u_c") {
            first = false;
            continue;
        }
        first = false;
        const std::string where = "detections line " + std::to_string(no);
        if (f.size() != 5) throw Error(ErrorCode::schema_error, where + ": expected 5 fields");
        EllipseParams e;
        e.xc = to_double(trim(f[0]), where);
        e.yc = to_double(trim(f[1]), where);
        e.a = to_double(trim(f[2]), where);
        e.b = to_double(trim(f[3]), where);
        e.psi = to_double(trim(f[4]), where);
        if (!(e.b > 0.0) || e.a < e.b) throw Error(ErrorCode::invalid_axes, where + ": need a >= b > 0");
        out.push_back(e);
    }
    return out;
}

std::vector<EllipseParams> load_detections(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot open " + path);
    return parse_detections(f);
}

void write_detections(std::ostream& out, const std::vector<EllipseParams>& d) {
    out << "u_c,v_c,a_px,b_px,psi_rad\n" << std::setprecision(17);
    for (const auto& e : d) out << e.xc << ',' << e.yc << ',' << e.a << ',' << e.b << ',' << e.psi << '\n';
}

Mat3 parse_attitude(const std::string& text) {
    std::string t;
    for (char c : text) t += (c == ',' ? ' ' : c);
    std::istringstream in(t);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') {
            std::getline(in, tok);
            continue;
        }
        v.push_back(to_double(tok, "attitude"));
    }
    if (v.size() == 4) {
        const Eigen::Quaterniond q(v[3], v[0], v[1], v[2]);
        if (!(q.norm() > 1e-12)) throw Error(ErrorCode::invalid_argument, "zero quaternion");
        return q.normalized().toRotationMatrix();
    }
    if (v.size() == 9) {
        Mat3 T;
        T << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        if ((T * T.transpose() - Mat3::Identity()).norm() > 1e-6 || T.determinant() < 0.0)
            throw Error(ErrorCode::invalid_argument, "attitude matrix is not a rotation");
        return T;
    }
    throw Error(ErrorCode::schema_error, "attitude needs 4 (quaternion xyzw) or 9 (matrix) numbers");
}

Mat3 load_attitude(const std::string& path) {
    return parse_attitude(slurp(path));
}

std::string format_attitude(const Mat3& T) {
    std::ostringstream o;
    o << std::setprecision(17);
    for (int r = 0; r < 3; ++r) o << T(r, 0) << ' ' << T(r, 1) << ' ' << T(r, 2) << '\n';
    return o.str();
}

}  // namespace craterid
