#include "stkde/intensity.hpp"

#include <algorithm>
#include <utility>

namespace stkde {

double numerator_mass(const IntensityGrid& g) {
  double s = 0;
  for (std::size_t i = 0; i < g.lambda.size(); ++i) s += g.lambda[i] * g.edge[i];
  return s * g.grid.voxel_volume();
}

IntensityGrid assemble_ratio(const Grid3& grid, const GridArray& num, const GridArray& edge,
                             EstimateInfo info) {
  IntensityGrid out{grid, GridArray(grid.dims(), 3), GridArray(grid.dims(), 3), std::move(info)};
  const auto& d = grid.dims();
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      if (!grid.inside(i, j)) continue;
      for (int k = 0; k < d[2]; ++k) {
        double e = std::max(edge.at(i, j, k), kEdgeFloor);
        out.edge.at(i, j, k) = e;
        out.lambda.at(i, j, k) = num.at(i, j, k) / e;
      }
    }
  }
  return out;
}

}  // namespace stkde
