#pragma once

#include <cstdint>
#include <vector>

#include "tclb/rational.hpp"

namespace tclb {

// Rows of a +-1 matrix with pairwise orthogonal rows.
struct OrthogonalSystem {
  int size = 0;
  std::vector<std::vector<std::int8_t>> rows;

  bool verify_orthogonal() const {
    if (static_cast<int>(rows.size()) != size) return false;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != size) return false;
      for (auto v : r)
        if (v != 1 && v != -1) return false;
    }
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j) {
        long dot = 0;
        for (int t = 0; t < size; ++t) dot += static_cast<long>(rows[i][t]) * rows[j][t];
        if (dot != 0) return false;
      }
    return true;
  }
};

// Sylvester doubling: H_1 = [1], H_2m = [[H, H], [H, -H]].
inline OrthogonalSystem walsh_system(int m) {
  if (m <= 0 || (m & (m - 1)) != 0)
    throw std::invalid_argument("walsh_system: size must be a power of 2");
  OrthogonalSystem sys;
  sys.size = m;
  sys.rows.assign(m, std::vector<std::int8_t>(m, 1));
  for (int block = 1; block < m; block *= 2)
    for (int i = 0; i < block; ++i)
      for (int j = 0; j < block; ++j) {
        sys.rows[i + block][j + block] = static_cast<std::int8_t>(-sys.rows[i][j]);
        sys.rows[i + block][j] = sys.rows[i][j];
        sys.rows[i][j + block] = sys.rows[i][j];
      }
  return sys;
}

}  // namespace tclb
