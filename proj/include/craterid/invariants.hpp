#pragma once

#include <array>
#include <vector>

#include "craterid/conic2d.hpp"

namespace craterid {

struct CoplanarInvariants7 {
    double I_ij = 0, I_jk = 0, I_ki = 0;
    double I_ji = 0, I_kj = 0, I_ik = 0;
    double I_ijk = 0;

    std::array<double, 7> as_array() const { return {I_ij, I_jk, I_ki, I_ji, I_kj, I_ik, I_ijk}; }
};

struct NoncoplanarInvariants3 {
    double J_i = 0, J_j = 0, J_k = 0;

    std::array<double, 3> as_array() const { return {J_i, J_j, J_k}; }
};

std::pair<double, double> coplanar_pair(const Mat3& ai, const Mat3& aj);
CoplanarInvariants7 coplanar_triad(const Mat3& ai, const Mat3& aj, const Mat3& ak);

/// Inputs: image loci of three disjoint ellipses (any scale).
NoncoplanarInvariants3 noncoplanar_triad(const Mat3& ai, const Mat3& aj, const Mat3& ak);

/// Cayley-Klein style ratio for one conic and two lines; acosh applied.
double cayley_klein_angle(const Mat3& locus, const Vec3& l1, const Vec3& l2);

struct CyclicF {
    double F1 = 0, F2 = 0, F3 = 0;
};
CyclicF cyclic_F(double x, double y, double z);

struct PairG {
    double G1 = 0, G2 = 0;
    double G1n = 0, G2n = 0;  // normalized
};
PairG pair_G(double x1, double y1, double z1, double x2, double y2, double z2);

enum class DescriptorKind : unsigned char { coplanar7 = 0, noncoplanar3 = 1 };
enum class Convention : unsigned char { ordered = 0, sorted = 1, p2 = 2, p2_nine = 3 };

const char* convention_name(Convention c);
const char* kind_name(DescriptorKind k);
int descriptor_dim(DescriptorKind k, Convention c);

/// Relabel (i,j,k) -> (i+r, j+r, k+r) mod 3.
CoplanarInvariants7 rotate_labels(const CoplanarInvariants7& v, int r);
NoncoplanarInvariants3 rotate_labels(const NoncoplanarInvariants3& v, int r);

struct TriadDescriptor {
    std::vector<double> values;
    Convention convention = Convention::ordered;
    int rotation = 0;  // label cycle applied to reach `values` (sorted convention)
};

TriadDescriptor make_descriptor(const CoplanarInvariants7& inv, Convention c);
TriadDescriptor make_descriptor(const NoncoplanarInvariants3& inv, Convention c);

}  // namespace craterid
