#include "craterid/error.hpp"

namespace craterid {

const char* error_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::invalid_axes: return "invalid-axes";
    case ErrorCode::not_an_ellipse: return "not-an-ellipse";
    case ErrorCode::singular_conic: return "singular-conic";
    case ErrorCode::singular_first_conic: return "singular-first-conic";
    case ErrorCode::wrong_eigenvalue_branch: return "wrong-eigenvalue-branch";
    case ErrorCode::ambiguous_separation: return "ambiguous-separation";
    case ErrorCode::polar_singularity: return "polar-singularity";
    case ErrorCode::behind_camera: return "behind-camera";
    case ErrorCode::degenerate_view: return "degenerate-view";
    case ErrorCode::singular_homography: return "singular-homography";
    case ErrorCode::not_normalized: return "not-normalized";
    case ErrorCode::overlap_detected: return "overlap-detected";
    case ErrorCode::acosh_domain: return "acosh-domain";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::schema_error: return "schema-error";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::version_mismatch: return "version-mismatch";
    case ErrorCode::degenerate_block: return "degenerate-block";
    case ErrorCode::rank_deficient_geometry: return "rank-deficient-geometry";
    case ErrorCode::numeric_anomaly: return "numeric-anomaly";
    case ErrorCode::invalid_argument: return "invalid-argument";
    }
    return "unknown";
}

}  // namespace craterid
