#include "craterid/catalog.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace craterid {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

namespace {

bool to_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    auto r = std::from_chars(b, e, v);
    return r.ec == std::errc() && r.ptr == e && std::isfinite(v);
}

constexpr double kDeg = M_PI / 180.0;

struct RobbinsColumns {
    int id = -1, lat = -1, lon = -1, dmaj = -1, dmin = -1, ang = -1, arc = -1;
    int lat_c = -1, lon_c = -1, d_c = -1;
};

bool add_record(CatalogLoad& out, CraterRecord rec, int line) {
    try {
        validate_record(rec);
    } catch (const Error& e) {
        out.errors.push_back({line, e.code(), e.what()});
        return false;
    }
    out.records.push_back(std::move(rec));
    return true;
}

void parse_native_row(CatalogLoad& out, const std::vector<std::string>& f, int line) {
    if (f.size() != 7) {
        out.errors.push_back({line, ErrorCode::schema_error, "expected 7 fields"});
        return;
    }
    double v[6];
    for (int i = 0; i < 6; ++i) {
        if (!to_double(f[i + 1], v[i])) {
            out.errors.push_back({line, ErrorCode::schema_error, "bad number '" + f[i + 1] + "'"});
            return;
        }
    }
    CraterRecord r;
    r.id = f[0];
    r.lat = v[0] * kDeg;
    r.lon = v[1] * kDeg;
    r.a = v[2];
    r.b = v[3];
    r.psi = v[4] * kDeg;
    r.arc_fraction = v[5];
    add_record(out, std::move(r), line);
}

void parse_robbins_row(CatalogLoad& out, const RobbinsColumns& c, const std::vector<std::string>& f, int line) {
    auto get = [&](int col, double& v) { return col >= 0 && col < int(f.size()) && to_double(f[col], v); };
    CraterRecord r;
    r.id = (c.id >= 0 && c.id < int(f.size())) ? f[c.id] : std::to_string(line);
    double lat, lon, dmaj, dmin, ang = 0.0, arc;
    if (get(c.lat, lat) && get(c.lon, lon) && get(c.dmaj, dmaj) && get(c.dmin, dmin)) {
        get(c.ang, ang);
    } else if (get(c.lat_c, lat) && get(c.lon_c, lon) && get(c.d_c, dmaj)) {
        dmin = dmaj;
        ang = 0.0;
    } else {
        out.errors.push_back({line, ErrorCode::schema_error, "missing position or size"});
        return;
    }
    if (!get(c.arc, arc)) {
        out.errors.push_back({line, ErrorCode::schema_error, "missing ARC_IMG"});
        return;
    }
    r.lat = lat * kDeg;
    r.lon = lon * kDeg;
    r.a = 0.5 * dmaj;
    r.b = 0.5 * dmin;
    r.psi = ang * kDeg;
    r.arc_fraction = arc;
    add_record(out, std::move(r), line);
}

}  // namespace

CatalogLoad parse_catalog(std::istream& in) {
    CatalogLoad out;
    std::string raw;
    int line = 0;
    bool seen_first = false;
    bool robbins = false;
    RobbinsColumns rc;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        auto f = split_csv_line(s);
        if (!seen_first) {
            seen_first = true;
            if (!f.empty() && f[0] == "CRATER_ID") {
                robbins = true;
                std::map<std::string, int> col;
                for (size_t i = 0; i < f.size(); ++i) col[f[i]] = int(i);
                auto at = [&](const char* k) { auto it = col.find(k); return it == col.end() ? -1 : it->second; };
                rc.id = at("CRATER_ID");
                rc.lat = at("LAT_ELLI_IMG");
                rc.lon = at("LON_ELLI_IMG");
                rc.dmaj = at("DIAM_ELLI_MAJOR_IMG");
                rc.dmin = at("DIAM_ELLI_MINOR_IMG");
                rc.ang = at("DIAM_ELLI_ANGLE_IMG");
                rc.arc = at("ARC_IMG");
                rc.lat_c = at("LAT_CIRC_IMG");
                rc.lon_c = at("LON_CIRC_IMG");
                rc.d_c = at("DIAM_CIRC_IMG");
                if (rc.arc < 0 || ((rc.lat < 0 || rc.dmaj < 0) && (rc.lat_c < 0 || rc.d_c < 0)))
                    throw Error(ErrorCode::schema_error, "Robbins header lacks required columns");
                continue;
            }
            if (!f.empty() && f[0] == "id") {
                std::string joined;
                for (size_t i = 0; i < f.size(); ++i) joined += (i ? "," : "") + f[i];
                if (joined != kCatalogHeader)
                    throw Error(ErrorCode::schema_error, "unexpected header: " + s);
                continue;
            }
        }
        if (robbins)
            parse_robbins_row(out, rc, f, line);
        else
            parse_native_row(out, f, line);
    }
    return out;
}

CatalogLoad load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    return parse_catalog(in);
}

void write_catalog(std::ostream& out, const std::vector<CraterRecord>& records) {
    out << kCatalogHeader << "\n" << std::setprecision(17);
    for (const auto& r : records)
        out << r.id << "," << r.lat / kDeg << "," << r.lon / kDeg << "," << r.a << "," << r.b << ","
            << r.psi / kDeg << "," << r.arc_fraction << "\n";
}

void save_catalog(const std::string& path, const std::vector<CraterRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    write_catalog(out, records);
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

}  // namespace craterid
