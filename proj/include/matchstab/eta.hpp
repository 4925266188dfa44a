#pragma once

#include <string>

#include "matchstab/rational.hpp"

namespace matchstab {

/// Value of the form base + coeff*eta where eta is a formal positive
/// infinitesimal: ordering is lexicographic on (base, coeff), so eta is
/// smaller than every positive rational but still breaks ties. Addition and
/// subtraction act componentwise; that is all the flow computations need.
struct EtaValue {
  Rational base;
  Rational eta;

  EtaValue() = default;
  EtaValue(Rational b) : base(b) {}
  EtaValue(Rational b, Rational e) : base(b), eta(e) {}

  EtaValue operator+(const EtaValue& o) const {
    return {base + o.base, eta + o.eta};
  }
  EtaValue operator-(const EtaValue& o) const {
    return {base - o.base, eta - o.eta};
  }
  EtaValue& operator+=(const EtaValue& o) { return *this = *this + o; }
  EtaValue& operator-=(const EtaValue& o) { return *this = *this - o; }

  bool operator==(const EtaValue& o) const {
    return base == o.base && eta == o.eta;
  }
  bool operator!=(const EtaValue& o) const { return !(*this == o); }
  bool operator<(const EtaValue& o) const {
    if (base != o.base) return base < o.base;
    return eta < o.eta;
  }
  bool operator>(const EtaValue& o) const { return o < *this; }
  bool operator<=(const EtaValue& o) const { return !(o < *this); }
  bool operator>=(const EtaValue& o) const { return !(*this < o); }

  std::string to_string() const {
    return base.to_string() + " + (" + eta.to_string() + ")eta";
  }
};

}  // namespace matchstab
