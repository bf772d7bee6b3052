#pragma once

#include <stdexcept>
#include <string>

namespace craterid {

enum class ErrorCode {
    invalid_axes,
    not_an_ellipse,
    singular_conic,
    singular_first_conic,
    wrong_eigenvalue_branch,
    ambiguous_separation,
    polar_singularity,
    behind_camera,
    degenerate_view,
    singular_homography,
    not_normalized,
    overlap_detected,
    acosh_domain,
    io_error,
    schema_error,
    dimension_mismatch,
    version_mismatch,
    degenerate_block,
    rank_deficient_geometry,
    numeric_anomaly,
    invalid_argument,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& what)
        : std::runtime_error(std::string(error_name(c)) + ": " + what), code_(c) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace craterid
