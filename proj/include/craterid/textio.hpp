#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "craterid/camera.hpp"
#include "craterid/index.hpp"

namespace craterid {

/// Flat `key = value` text; '#' starts a comment, blank lines ignored.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_kv(std::istream& in);
KeyValues load_kv(const std::string& path);

std::string kv_string(const KeyValues& kv, const std::string& key, const std::string& dflt);
double kv_double(const KeyValues& kv, const std::string& key, double dflt);
int kv_int(const KeyValues& kv, const std::string& key, int dflt);
bool kv_bool(const KeyValues& kv, const std::string& key, bool dflt);

/// Either fov_deg + rows + cols, or dx, dy, up, vp (+ skew) + rows + cols.
Camera camera_from_kv(const KeyValues& kv);
void write_camera(std::ostream& out, const Camera& cam);

/// `scale = local|regional|global` followed by optional field overrides.
IndexScale scale_from_kv(const KeyValues& kv);

/// CSV rows u_c,v_c,a_px,b_px,psi_rad; '#' comments; an optional header.
std::vector<EllipseParams> parse_detections(std::istream& in);
std::vector<EllipseParams> load_detections(const std::string& path);
void write_detections(std::ostream& out, const std::vector<EllipseParams>& d);

/// Four numbers: quaternion x y z w (scalar last). Nine numbers: T_MC
/// row-major. Separators may be spaces, commas or newlines.
Mat3 parse_attitude(const std::string& text);
Mat3 load_attitude(const std::string& path);
std::string format_attitude(const Mat3& T);

}  // namespace craterid
