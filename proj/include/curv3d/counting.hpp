#pragma once

// Closed-form count of algebraically independent curvature scalars and the
// Karlhede bound.

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace curv3d {

using BigInt = boost::multiprecision::cpp_int;

struct CountBreakdown {
  int n = 0, p = 0;
  BigInt first;   // n(n+1)(n+p+2)! / (2 n! (p+2)!)
  BigInt second;  // (n+p+3)! / ((n-1)! (p+3)!)
  BigInt third;   // n
  BigInt total;
  bool special = false;  // N(2,2) = 1 override
};

/// N(n, p) with exact integer arithmetic; throws std::domain_error for n < 2 or p < 0.
BigInt count_independent(int n, int p);
CountBreakdown count_breakdown(int n, int p);

/// q = N0 + n + 1.
int karlhede_bound(int N0, int n);

}  // namespace curv3d
