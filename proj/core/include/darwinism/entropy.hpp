#pragma once

#include <stdexcept>

namespace darwinism {

/// Information in bits (base-2 logarithm).
using Bits = double;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// H(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0. Arguments within
/// 1e-12 of [0, 1] are clamped; anything further out throws DomainError.
Bits binary_entropy(double x);

/// Holevo quantity of the pointer observable for a fragment whose two
/// conditional states are pure with squared overlap `gamma2_fragment`.
///
/// The fragment holds the mixture p0|e0><e0| + p1|e1><e1|, whose larger
/// eigenvalue is (1 + sqrt(1 - 4 p0 p1 (1 - gamma2))) / 2; the Holevo
/// quantity is the binary entropy of that eigenvalue. For p0 = 1/2 this is
/// H((1 + |gamma|) / 2).
Bits holevo_from_overlap(double gamma2_fragment, double p0);

}  // namespace darwinism
