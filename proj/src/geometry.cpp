#include "tw/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tw/errors.hpp"

namespace tw {

void SpacetimeSpec::validate() const {
  if (dimension != 1 && dimension != 3)
    throw ConfigError("spatial dimension must be 1 or 3, got " + std::to_string(dimension));
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (curvature_coupling != 0.0)
    throw ConfigError("curvature coupling must be 0 on flat spacetime");
  if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
  if (!std::isfinite(t0)) throw ConfigError("t0 must be finite");
}

double Tile::spatial_volume() const { return (2.0 * half_width.array()).prod(); }

double spatial_gap(const Tile& a, const Tile& b) {
  const Eigen::ArrayXd sep = (a.center - b.center).array().abs() -
                             (a.half_width + b.half_width).array();
  return sep.max(0.0).matrix().norm();
}

bool check_spacelike(const Tile& a, const Tile& b) {
  return spatial_gap(a, b) > a.temporal_half_width + b.temporal_half_width;
}

std::vector<std::pair<int, int>> causal_violations(const std::vector<Tile>& tiles) {
  std::vector<std::pair<int, int>> bad;
  for (std::size_t i = 0; i < tiles.size(); ++i)
    for (std::size_t j = i + 1; j < tiles.size(); ++j)
      if (!check_spacelike(tiles[i], tiles[j]))
        bad.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return bad;
}

CovariantScales covariant_scales(const TilingLayout& layout) {
  if (layout.tiles.empty()) throw ConfigError("covariant scales of an empty layout");
  const double n = layout.spec.dimension;
  double v_min = std::numeric_limits<double>::infinity();
  for (const auto& t : layout.tiles) v_min = std::min(v_min, t.spatial_volume());
  const double l_uv = std::pow(v_min, 1.0 / n);
  const double l_ir = std::pow(static_cast<double>(layout.tiles.size()), 1.0 / n) * l_uv;
  return {l_uv, l_ir};
}

namespace {

void validate_tile(const Tile& t, int n) {
  const std::string id = "tile " + std::to_string(t.index);
  if (t.center.size() != n || t.half_width.size() != n)
    throw ConfigError(id + ": centre and half widths must have length n");
  if (!(t.half_width.array() > 0.0).all()) throw ConfigError(id + ": half widths must be positive");
  if (!(t.temporal_half_width > 0.0))
    throw ConfigError(id + ": temporal half width must be positive");
}

}  // namespace

TilingLayout make_layout(const SpacetimeSpec& spec, std::vector<Tile> tiles, double corridor) {
  spec.validate();
  if (tiles.empty()) throw ConfigError("layout needs at least one tile");
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    tiles[i].index = static_cast<int>(i);
    validate_tile(tiles[i], spec.dimension);
  }
  auto bad = causal_violations(tiles);
  if (!bad.empty()) {
    std::string msg = "tiles not pairwise spacelike:";
    for (auto [i, j] : bad) msg += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    throw CausalOverlapError(msg, std::move(bad));
  }
  TilingLayout layout{spec, std::move(tiles), corridor, 0.0, 0.0};
  const auto scales = covariant_scales(layout);
  layout.l_uv = scales.l_uv;
  layout.l_ir = scales.l_ir;
  return layout;
}

TilingLayout build_tiling(const SpacetimeSpec& spec, int tiles_per_axis, double l_uv,
                          double epsilon, double corridor) {
  spec.validate();
  if (tiles_per_axis < 1) throw ConfigError("tiles_per_axis must be at least 1");
  if (!(l_uv > 0.0)) throw ConfigError("l_uv must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");

  const int n = spec.dimension;
  const double spacing = l_uv + corridor;
  const double offset = 0.5 * (tiles_per_axis - 1);
  int total = 1;
  for (int d = 0; d < n; ++d) total *= tiles_per_axis;

  std::vector<Tile> tiles;
  tiles.reserve(total);
  for (int idx = 0; idx < total; ++idx) {
    Tile t;
    t.index = idx;
    t.center.resize(n);
    // Last axis varies fastest.
    int rem = idx;
    for (int d = n - 1; d >= 0; --d) {
      t.center[d] = (rem % tiles_per_axis - offset) * spacing;
      rem /= tiles_per_axis;
    }
    t.half_width = Eigen::VectorXd::Constant(n, 0.5 * l_uv);
    t.temporal_half_width = epsilon;
    tiles.push_back(std::move(t));
  }
  if (!(corridor > 2.0 * epsilon))
    throw CausalOverlapError("corridor must exceed 2*epsilon for spacelike separation",
                             causal_violations(tiles));
  return make_layout(spec, std::move(tiles), corridor);
}

TilingLayout translated(const TilingLayout& layout, const Eigen::VectorXd& shift) {
  TilingLayout out = layout;
  for (auto& t : out.tiles) t.center += shift;
  return out;
}

}  // namespace tw
