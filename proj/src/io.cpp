#include "tw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "tw/errors.hpp"

namespace tw {
namespace {

void dump_into(const json& v, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string((depth + 1) * indent, ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(depth * indent, ' ') : "";
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += close + '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) {
        return !e.is_structured();
      });
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat || indent == 0 ? (indent > 0 ? ", " : ",") : ",";
        if (!flat) out += pad;
        first = false;
        dump_into(e, indent, depth + 1, out);
      }
      if (!flat) out += close;
      out += ']';
      return;
    }
    case json::value_t::number_float: out += format_number(v.get<double>()); return;
    default: out += v.dump(); return;
  }
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& a, const char* what) {
  if (!a.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ConfigError(std::string(what) + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const json& value, int indent) {
  std::string out;
  dump_into(value, indent, 0, out);
  out += '\n';
  return out;
}

json profile_to_json(const BumpProfile& profile) {
  json p = {{"family", to_string(profile.family)}};
  if (profile.family == ProfileFamily::gaussian_truncated) {
    p["sigma"] = profile.sigma;
    p["r_cut"] = profile.r_cut;
  }
  return p;
}

BumpProfile profile_from_json(const json& doc) {
  if (doc.is_string()) {
    BumpProfile p;
    p.family = profile_family_from_string(doc.get<std::string>());
    return p;
  }
  BumpProfile p;
  p.family = profile_family_from_string(doc.value("family", std::string("smooth_bump")));
  p.sigma = doc.value("sigma", 0.0);
  p.r_cut = doc.value("r_cut", 6.0);
  return p;
}

json layout_to_json(const TilingLayout& layout, const BumpProfile& profile,
                    const std::vector<LocalModePair>* pairs) {
  json doc;
  doc["n"] = layout.spec.dimension;
  doc["m"] = layout.spec.mass;
  doc["hbar"] = layout.spec.hbar;
  doc["t0"] = layout.spec.t0;
  doc["xi"] = layout.spec.curvature_coupling;
  doc["epsilon"] = layout.tiles.empty() ? 0.0 : layout.tiles.front().temporal_half_width;
  doc["corridor"] = layout.corridor;
  doc["l_uv"] = layout.l_uv;
  doc["l_ir"] = layout.l_ir;
  doc["N"] = layout.size();
  doc["profile"] = profile_to_json(profile);
  json tiles = json::array();
  for (std::size_t i = 0; i < layout.tiles.size(); ++i) {
    const Tile& t = layout.tiles[i];
    json jt = {{"index", t.index},
               {"center", vector_to_json(t.center)},
               {"half_widths", vector_to_json(t.half_width)},
               {"epsilon", t.temporal_half_width},
               {"profile", t.profile_id}};
    if (pairs && i < pairs->size()) {
      jt["raw_commutator"] = (*pairs)[i].raw_commutator;
      jt["normalization"] = (*pairs)[i].normalization;
      jt["lambda"] = (*pairs)[i].lambda;
    }
    tiles.push_back(jt);
  }
  doc["tiles"] = tiles;
  return doc;
}

TilingLayout layout_from_json(const json& doc) {
  SpacetimeSpec spec;
  spec.dimension = doc.at("n").get<int>();
  spec.mass = doc.at("m").get<double>();
  spec.hbar = doc.value("hbar", 1.0);
  spec.t0 = doc.value("t0", 0.0);
  spec.curvature_coupling = doc.value("xi", 0.0);
  const double eps = doc.value("epsilon", 0.0);
  std::vector<Tile> tiles;
  int index = 0;
  for (const auto& jt : doc.at("tiles")) {
    Tile t;
    t.index = index++;
    t.center = vector_from_json(jt.at("center"), "tile center");
    t.half_width = vector_from_json(jt.at("half_widths"), "tile half_widths");
    t.temporal_half_width = jt.value("epsilon", eps);
    t.profile_id = jt.value("profile", 0);
    tiles.push_back(std::move(t));
  }
  return make_layout(spec, std::move(tiles), doc.value("corridor", 0.0));
}

std::string matrix_text(const Eigen::MatrixXd& m, const std::string& label,
                        const std::string& grid_fingerprint) {
  std::string out = "# " + label + "\n# rows " + std::to_string(m.rows()) + " cols " +
                    std::to_string(m.cols()) + "\n# grid " + grid_fingerprint + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double x;
    while (ls >> x) row.push_back(x);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m.cols())
      throw ConfigError("ragged matrix text");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc) {
  const Eigen::Index r = static_cast<Eigen::Index>(doc.size());
  const Eigen::Index c = r ? static_cast<Eigen::Index>(doc[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) m.row(i) = vector_from_json(doc[i], "matrix row").transpose();
  return m;
}

std::string distribution_csv(const QuasiDistribution& dist) {
  std::string out;
  for (int d = 0; d < dist.grid.dimension(); ++d) {
    out += (d % 2 == 0 ? "x" : "p") + std::to_string(d / 2 + 1) + ",";
  }
  out += "value\n";
  for (Eigen::Index i = 0; i < dist.values.size(); ++i) {
    const Eigen::VectorXd xi = dist.grid.point(i);
    for (Eigen::Index d = 0; d < xi.size(); ++d) out += format_number(xi[d]) + ",";
    out += format_number(dist.values[i]) + "\n";
  }
  return out;
}

json distribution_summary(const QuasiDistribution& dist) {
  return {{"s", dist.s},
          {"method", dist.method},
          {"state", dist.state},
          {"normalization", dist.normalization},
          {"min_value", dist.min_value},
          {"max_value", dist.max_value},
          {"negativity", dist.negativity},
          {"imaginary_residue", dist.imaginary_residue},
          {"points", dist.values.size()},
          {"lower", vector_to_json(dist.grid.lower)},
          {"upper", vector_to_json(dist.grid.upper)},
          {"nodes", std::vector<int>(dist.grid.nodes.data(),
                                     dist.grid.nodes.data() + dist.grid.nodes.size())},
          {"grid_fingerprint", dist.grid_fingerprint}};
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw ConfigError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace tw
