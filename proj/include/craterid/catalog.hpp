#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "craterid/crater3d.hpp"

namespace craterid {

struct RowError {
    int line = 0;
    ErrorCode code = ErrorCode::schema_error;
    std::string message;
};

struct CatalogLoad {
    std::vector<CraterRecord> records;
    std::vector<RowError> errors;
};

inline constexpr const char* kCatalogHeader =
    "id,lat_deg,lon_deg,semimajor_km,semiminor_km,orient_deg_east_ccw,arc_fraction";

/// Native schema, or the Robbins lunar crater database schema when the
/// header carries CRATER_ID (ellipse columns, falling back to circle fits).
CatalogLoad parse_catalog(std::istream& in);
CatalogLoad load_catalog(const std::string& path);

void write_catalog(std::ostream& out, const std::vector<CraterRecord>& records);
void save_catalog(const std::string& path, const std::vector<CraterRecord>& records);

std::vector<std::string> split_csv_line(const std::string& line);
std::string trim(const std::string& s);

}  // namespace craterid
