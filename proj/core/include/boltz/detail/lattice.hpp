#pragma once

namespace boltz::detail {

// Visits integer vectors z in [-m, m]^d whose first nonzero component is positive.
template <class F>
void for_half_lattice(int d, int m, F&& visit) {
  int z[3] = {0, 0, 0};
  if (d == 2) {
    for (int b = -m; b <= m; ++b)
      for (int a = -m; a <= m; ++a) {
        if (a < 0 || (a == 0 && b <= 0)) continue;
        z[0] = a;
        z[1] = b;
        visit(static_cast<const int*>(z));
      }
    return;
  }
  for (int c = -m; c <= m; ++c)
    for (int b = -m; b <= m; ++b)
      for (int a = -m; a <= m; ++a) {
        if (a < 0 || (a == 0 && (b < 0 || (b == 0 && c <= 0)))) continue;
        z[0] = a;
        z[1] = b;
        z[2] = c;
        visit(static_cast<const int*>(z));
      }
}

}  // namespace boltz::detail
