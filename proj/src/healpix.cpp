#include "craterid/healpix.hpp"

#include <algorithm>
#include <cmath>

namespace craterid {

namespace {

uint64_t spread_bits(uint64_t v) {
    v &= 0xffffffffULL;
    v = (v | (v << 16)) & 0x0000ffff0000ffffULL;
    v = (v | (v << 8)) & 0x00ff00ff00ff00ffULL;
    v = (v | (v << 4)) & 0x0f0f0f0f0f0f0f0fULL;
    v = (v | (v << 2)) & 0x3333333333333333ULL;
    v = (v | (v << 1)) & 0x5555555555555555ULL;
    return v;
}

uint64_t compress_bits(uint64_t v) {
    v &= 0x5555555555555555ULL;
    v = (v | (v >> 1)) & 0x3333333333333333ULL;
    v = (v | (v >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
    v = (v | (v >> 4)) & 0x00ff00ff00ff00ffULL;
    v = (v | (v >> 8)) & 0x0000ffff0000ffffULL;
    v = (v | (v >> 16)) & 0x00000000ffffffffULL;
    return v;
}

constexpr int xoffset[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int yoffset[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// rows: S, SE, E, SW, center, NE, W, NW, N
constexpr int facearray[9][12] = {
    {8, 9, 10, 11, -1, -1, -1, -1, 10, 11, 8, 9},
    {5, 6, 7, 4, 8, 9, 10, 11, 9, 10, 11, 8},
    {-1, -1, -1, -1, 5, 6, 7, 4, -1, -1, -1, -1},
    {4, 5, 6, 7, 11, 8, 9, 10, 11, 8, 9, 10},
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11},
    {1, 2, 3, 0, 0, 1, 2, 3, 5, 6, 7, 4},
    {-1, -1, -1, -1, 7, 4, 5, 6, -1, -1, -1, -1},
    {3, 0, 1, 2, 3, 0, 1, 2, 4, 5, 6, 7},
    {2, 3, 0, 1, -1, -1, -1, -1, 0, 1, 2, 3},
};

// bit 1: flip x, bit 2: flip y, bit 4: swap x and y
constexpr int swaparray[9][3] = {
    {0, 0, 3}, {0, 0, 6}, {0, 0, 0}, {0, 0, 5}, {0, 0, 0},
    {5, 0, 0}, {0, 0, 0}, {6, 0, 0}, {3, 0, 0},
};

}  // namespace

HealpixGrid::HealpixGrid(int order) : order_(order), nside_(int64_t(1) << order) {
    if (order < 0 || order > 29) throw Error(ErrorCode::invalid_argument, "HEALPix order out of range");
}

int64_t HealpixGrid::xyf2nest(int ix, int iy, int face) const {
    return (int64_t(face) << (2 * order_)) + int64_t(spread_bits(ix)) + (int64_t(spread_bits(iy)) << 1);
}

void HealpixGrid::nest2xyf(int64_t pix, int& ix, int& iy, int& face) const {
    const int64_t npface = nside_ * nside_;
    face = int(pix / npface);
    const uint64_t p = uint64_t(pix & (npface - 1));
    ix = int(compress_bits(p));
    iy = int(compress_bits(p >> 1));
}

int64_t HealpixGrid::loc2pix(double z, double phi, double sth, bool have_sth) const {
    const double za = std::abs(z);
    double tt = std::fmod(phi * (2.0 / M_PI), 4.0);
    if (tt < 0.0) tt += 4.0;
    if (tt >= 4.0) tt -= 4.0;
    const int64_t ns = nside_;
    if (za <= 2.0 / 3.0) {
        const double temp1 = ns * (0.5 + tt);
        const double temp2 = ns * (z * 0.75);
        const int64_t jp = int64_t(temp1 - temp2);
        const int64_t jm = int64_t(temp1 + temp2);
        const int64_t ifp = jp >> order_;
        const int64_t ifm = jm >> order_;
        const int face = int((ifp == ifm) ? (ifp | 4) : ((ifp < ifm) ? ifp : (ifm + 8)));
        const int ix = int(jm & (ns - 1));
        const int iy = int(ns - (jp & (ns - 1)) - 1);
        return xyf2nest(ix, iy, face);
    }
    const int ntt = std::min(3, int(tt));
    const double tp = tt - ntt;
    const double tmp = (za < 0.99 || !have_sth) ? ns * std::sqrt(3.0 * (1.0 - za))
                                                : ns * sth / std::sqrt((1.0 + za) / 3.0);
    int64_t jp = int64_t(tp * tmp);
    int64_t jm = int64_t((1.0 - tp) * tmp);
    jp = std::min(jp, ns - 1);
    jm = std::min(jm, ns - 1);
    if (z >= 0) return xyf2nest(int(ns - jm - 1), int(ns - jp - 1), ntt);
    return xyf2nest(int(jp), int(jm), ntt + 8);
}

int64_t HealpixGrid::ang2pix(const Vec3& dir) const {
    const double xy = std::hypot(dir.x(), dir.y());
    const double r = std::hypot(xy, dir.z());
    if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "zero direction");
    return loc2pix(dir.z() / r, std::atan2(dir.y(), dir.x()), xy / r, true);
}

int64_t HealpixGrid::ang2pix(double theta, double phi) const {
    return loc2pix(std::cos(theta), phi, std::sin(theta), theta < 0.01 || theta > M_PI - 0.01);
}

void HealpixGrid::neighbors8(int64_t pix, int64_t out[8]) const {
    int ix, iy, face;
    nest2xyf(pix, ix, iy, face);
    const int64_t ns = nside_;
    const int64_t nsm1 = ns - 1;
    if (ix > 0 && ix < nsm1 && iy > 0 && iy < nsm1) {
        for (int m = 0; m < 8; ++m) out[m] = xyf2nest(ix + xoffset[m], iy + yoffset[m], face);
        return;
    }
    for (int m = 0; m < 8; ++m) {
        int64_t x = ix + xoffset[m], y = iy + yoffset[m];
        int nbnum = 4;
        if (x < 0) { x += ns; nbnum -= 1; }
        else if (x >= ns) { x -= ns; nbnum += 1; }
        if (y < 0) { y += ns; nbnum -= 3; }
        else if (y >= ns) { y -= ns; nbnum += 3; }
        const int f = facearray[nbnum][face];
        if (f < 0) {
            out[m] = -1;
            continue;
        }
        const int bits = swaparray[nbnum][face >> 2];
        if (bits & 1) x = ns - x - 1;
        if (bits & 2) y = ns - y - 1;
        if (bits & 4) std::swap(x, y);
        out[m] = xyf2nest(int(x), int(y), f);
    }
}

std::vector<int64_t> HealpixGrid::neighbors(int64_t pix) const {
    if (pix < 0 || pix >= npix()) throw Error(ErrorCode::invalid_argument, "pixel id out of range");
    int64_t nb[8];
    neighbors8(pix, nb);
    std::vector<int64_t> out;
    for (int64_t p : nb)
        if (p >= 0 && p != pix && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    return out;
}

}  // namespace craterid
