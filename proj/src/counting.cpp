#include "curv3d/counting.hpp"

#include <stdexcept>

namespace curv3d {

namespace {

BigInt factorial(int k) {
  BigInt f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

BigInt exact_div(const BigInt& a, const BigInt& b) {
  if (a % b != 0) throw std::logic_error("non-integral term in counting formula");
  return a / b;
}

}  // namespace

CountBreakdown count_breakdown(int n, int p) {
  if (n < 2) throw std::domain_error("dimension must be at least 2");
  if (p < 0) throw std::domain_error("derivative order must be non-negative");
  CountBreakdown b;
  b.n = n;
  b.p = p;
  b.first = exact_div(BigInt(n) * (n + 1) * factorial(n + p + 2), 2 * factorial(n) * factorial(p + 2));
  b.second = exact_div(factorial(n + p + 3), factorial(n - 1) * factorial(p + 3));
  b.third = n;
  b.total = b.first - b.second + b.third;
  if (n == 2 && p == 2) {
    b.special = true;
    b.total = 1;
  }
  return b;
}

BigInt count_independent(int n, int p) { return count_breakdown(n, p).total; }

int karlhede_bound(int N0, int n) {
  if (N0 < 0) throw std::domain_error("isotropy dimension must be non-negative");
  if (n < 2) throw std::domain_error("dimension must be at least 2");
  return N0 + n + 1;
}

}  // namespace curv3d
