#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tw {

/// Flat (n+1)-dimensional Minkowski background of a free Klein-Gordon field.
struct SpacetimeSpec {
  int dimension = 1;              ///< spatial dimension n, 1 or 3
  double mass = 1.0;              ///< inverse length, > 0
  double curvature_coupling = 0;  ///< xi; carried but must be 0 (flat)
  double hbar = 1.0;
  double t0 = 0.0;                ///< time of the Cauchy slice

  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

/// Compact box-shaped support of one local mode inside the slab |t - t0| <= eps.
struct Tile {
  int index = 0;
  Eigen::VectorXd center;      ///< spatial centre (length n)
  Eigen::VectorXd half_width;  ///< per axis, > 0
  double temporal_half_width = 0.0;
  int profile_id = 0;

  double spatial_volume() const;
};

struct TilingLayout {
  SpacetimeSpec spec;
  std::vector<Tile> tiles;
  double corridor = 0.0;
  double l_uv = 0.0;
  double l_ir = 0.0;

  int size() const { return static_cast<int>(tiles.size()); }
};

struct CovariantScales {
  double l_uv;
  double l_ir;
};

/// Regular grid of tiles_per_axis^n boxes of width l_uv separated by
/// `corridor`, centred on the spatial origin at time t0.
TilingLayout build_tiling(const SpacetimeSpec& spec, int tiles_per_axis, double l_uv,
                          double epsilon, double corridor);

/// Validates a user supplied tile list. Throws CausalOverlapError naming every
/// offending pair.
TilingLayout make_layout(const SpacetimeSpec& spec, std::vector<Tile> tiles, double corridor);

/// Euclidean distance between two axis-aligned spatial boxes (0 if they touch).
double spatial_gap(const Tile& a, const Tile& b);

/// True iff the spatial gap strictly exceeds eps_a + eps_b. For two
/// time-slab boxes at a common t0 this is exactly the flat-space condition
/// that no causal curve joins them.
bool check_spacelike(const Tile& a, const Tile& b);

/// All index pairs (i < j) that fail check_spacelike.
std::vector<std::pair<int, int>> causal_violations(const std::vector<Tile>& tiles);

/// l_uv = (min_k V_k)^(1/n), l_ir = N^(1/n) l_uv.
CovariantScales covariant_scales(const TilingLayout& layout);

/// Same layout with every tile centre shifted by `shift`.
TilingLayout translated(const TilingLayout& layout, const Eigen::VectorXd& shift);

}  // namespace tw
