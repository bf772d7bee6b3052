#pragma once

#include <cstdint>
#include <vector>

#include "craterid/conic2d.hpp"

namespace craterid {

/// NESTED HEALPix grid with nside = 2^order.
class HealpixGrid {
public:
    explicit HealpixGrid(int order);

    int order() const { return order_; }
    int64_t nside() const { return nside_; }
    int64_t npix() const { return 12 * nside_ * nside_; }

    /// Direction need not be normalized.
    int64_t ang2pix(const Vec3& dir) const;
    int64_t ang2pix(double theta, double phi) const;

    /// Up to 8 neighbors (7 at the polar-corner pixels), missing ones dropped.
    std::vector<int64_t> neighbors(int64_t pix) const;

    /// healpy order SW, W, NW, N, NE, E, SE, S with -1 for missing.
    void neighbors8(int64_t pix, int64_t out[8]) const;

private:
    int64_t loc2pix(double z, double phi, double sth, bool have_sth) const;
    int64_t xyf2nest(int ix, int iy, int face) const;
    void nest2xyf(int64_t pix, int& ix, int& iy, int& face) const;

    int order_;
    int64_t nside_;
};

}  // namespace craterid
