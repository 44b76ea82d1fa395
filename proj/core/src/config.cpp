#include "holo/config.hpp"

#include <fstream>

namespace holo::config {

using nlohmann::json;

namespace {

json parse_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(filename, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(filename, e.what());
  }
}

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "/" + key, "missing");
  return *it;
}

std::string get_string(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<double>();
}

Box parse_box(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected [[lo, hi], ...]");
  Box b;
  const int d = static_cast<int>(j.size());
  b.lo.resize(d);
  b.hi.resize(d);
  for (int i = 0; i < d; ++i) {
    const json& iv = j[static_cast<std::size_t>(i)];
    if (!iv.is_array() || iv.size() != 2)
      throw ConfigError(path + "/" + std::to_string(i), "expected [lo, hi]");
    b.lo[i] = iv[0].get<double>();
    b.hi[i] = iv[1].get<double>();
    if (!(b.lo[i] < b.hi[i]))
      throw ConfigError(path + "/" + std::to_string(i), "needs lo < hi");
  }
  return b;
}

Eigen::VectorXd parse_coords(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a coordinate array");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(path + "/" + std::to_string(i), "expected a number");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

dsl::ExprFn parse_dsl(const std::string& src, int arity, const dsl::Shape& shape,
                      const std::string& path) {
  try {
    return dsl::parse_expr(src, arity, shape);
  } catch (const Error& e) {
    throw ConfigError(path, std::string(e.what()) + " in \"" + src + "\"");
  }
}

AtlasPtr parse_atlas(const json& j, const std::string& path) {
  const json& jd = field(j, "dim", path);
  if (!jd.is_number_integer()) throw ConfigError(path + "/dim", "expected an integer");
  const int dim = jd.get<int>();

  std::vector<Chart> charts;
  const json& jc = field(j, "charts", path);
  if (!jc.is_array() || jc.empty()) throw ConfigError(path + "/charts", "expected a list");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string cp = path + "/charts/" + std::to_string(i);
    charts.push_back({get_string(jc[i], "name", cp), parse_box(field(jc[i], "box", cp), cp + "/box")});
  }

  std::vector<Overlap> overlaps;
  if (j.contains("overlaps")) {
    const json& jo = j.at("overlaps");
    if (!jo.is_array()) throw ConfigError(path + "/overlaps", "expected a list");
    for (std::size_t i = 0; i < jo.size(); ++i) {
      const std::string op = path + "/overlaps/" + std::to_string(i);
      overlaps.push_back({get_string(jo[i], "from", op), get_string(jo[i], "to", op),
                          parse_box(field(jo[i], "box", op), op + "/box"),
                          parse_dsl(get_string(jo[i], "map", op), dim, dsl::Shape::vector(dim),
                                    op + "/map")});
    }
  }

  try {
    return std::make_shared<Atlas>(dim, std::move(charts), std::move(overlaps));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<PathSegment> parse_segments(const json& j, const std::string& path,
                                        const AtlasPtr& atlas) {
  const json& js = field(j, "segments", path);
  if (!js.is_array() || js.empty()) throw ConfigError(path + "/segments", "expected a list");
  std::vector<PathSegment> segs;
  const int d = atlas->dim();
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string sp = path + "/segments/" + std::to_string(i);
    const json& iv = field(js[i], "interval", sp);
    if (!iv.is_array() || iv.size() != 2) throw ConfigError(sp + "/interval", "expected [t0, t1]");
    segs.push_back({get_string(js[i], "chart", sp),
                    parse_dsl(get_string(js[i], "map", sp), 1, dsl::Shape::vector(d), sp + "/map"),
                    iv[0].get<double>(), iv[1].get<double>()});
  }
  return segs;
}

}  // namespace

LoadedConnection load_connection_json(const json& j, const std::string& where) {
  const AtlasPtr atlas = parse_atlas(field(j, "atlas", where), where + "/atlas");
  const json& jc = field(j, "connection", where);
  const std::string cp = where + "/connection";

  lie::GroupSpec group;
  try {
    group = lie::GroupSpec::from_string(get_string(jc, "group", cp));
  } catch (const Error& e) {
    throw ConfigError(cp + "/group", e.what());
  }
  const int d = atlas->dim();
  const int n = group.dim_matrix();
  const dsl::Shape mat = dsl::Shape::matrix(n, n);

  std::map<std::string, std::vector<dsl::ExprFn>> forms;
  if (jc.contains("local_forms")) {
    const json& jf = jc.at("local_forms");
    if (!jf.is_object()) throw ConfigError(cp + "/local_forms", "expected chart -> [A_i] map");
    for (const auto& [chart, list] : jf.items()) {
      const std::string fp = cp + "/local_forms/" + chart;
      if (!list.is_array() || static_cast<int>(list.size()) != d)
        throw ConfigError(fp, "expected " + std::to_string(d) + " coefficient expressions");
      std::vector<dsl::ExprFn> fs;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].is_string())
          throw ConfigError(fp + "/" + std::to_string(i), "expected a DSL string");
        fs.push_back(parse_dsl(list[i].get<std::string>(), d, mat, fp + "/" + std::to_string(i)));
      }
      forms[chart] = std::move(fs);
    }
  }

  std::vector<dsl::ExprFn> transitions;
  if (jc.contains("transitions")) {
    const json& jt = jc.at("transitions");
    if (!jt.is_array()) throw ConfigError(cp + "/transitions", "expected a list");
    for (std::size_t i = 0; i < jt.size(); ++i) {
      if (!jt[i].is_string())
        throw ConfigError(cp + "/transitions/" + std::to_string(i), "expected a DSL string");
      transitions.push_back(parse_dsl(jt[i].get<std::string>(), d, mat,
                                      cp + "/transitions/" + std::to_string(i)));
    }
  }

  try {
    ConnectionData conn(Atlas(*atlas), group, std::move(forms), std::move(transitions));
    return {atlas, std::move(conn)};
  } catch (const Error& e) {
    throw ConfigError(cp, e.what());
  }
}

LoadedConnection load_connection_file(const std::string& filename) {
  return load_connection_json(parse_file(filename), filename);
}

Path load_path_json(const json& j, const std::string& where, AtlasPtr atlas) {
  const double sr = get_number_or(j, "sitting_radius", 0.1);
  auto segs = parse_segments(j, where, atlas);
  try {
    return Path(std::move(atlas), std::move(segs), sr);
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

Path load_path_file(const std::string& filename, AtlasPtr atlas) {
  const json j = parse_file(filename);
  return load_path_json(field(j, "path", filename), filename + "/path", std::move(atlas));
}

Homotopy load_homotopy_file(const std::string& filename, AtlasPtr atlas) {
  const json root = parse_file(filename);
  const json& j = field(root, "homotopy", filename);
  const std::string hp = filename + "/homotopy";
  const int d = atlas->dim();

  Path g0 = load_path_json(field(j, "gamma0", hp), hp + "/gamma0", atlas);
  Path g1 = load_path_json(field(j, "gamma1", hp), hp + "/gamma1", atlas);

  const json& jp = field(j, "pieces", hp);
  if (!jp.is_array() || jp.empty()) throw ConfigError(hp + "/pieces", "expected a list");
  std::vector<HomotopyPiece> pieces;
  for (std::size_t i = 0; i < jp.size(); ++i) {
    const std::string pp = hp + "/pieces/" + std::to_string(i);
    const json& iv = field(jp[i], "interval", pp);
    if (!iv.is_array() || iv.size() != 2) throw ConfigError(pp + "/interval", "expected [s0, s1]");
    pieces.push_back({get_string(jp[i], "chart", pp), iv[0].get<double>(), iv[1].get<double>(),
                      parse_dsl(get_string(jp[i], "map", pp), 2, dsl::Shape::vector(d),
                                pp + "/map")});
  }
  try {
    return dsl_homotopy(atlas, std::move(pieces), std::move(g0), std::move(g1),
                        get_number_or(j, "collar_s", 0.1), get_number_or(j, "collar_t", 0.1));
  } catch (const Error& e) {
    throw ConfigError(hp, e.what());
  }
}

PathFamily load_family_file(const std::string& filename, AtlasPtr atlas) {
  const json root = parse_file(filename);
  const json& j = field(root, "family", filename);
  const std::string fp = filename + "/family";

  PathFamily fam;
  fam.atlas = atlas;
  fam.param_box = parse_box(field(j, "param_box", fp), fp + "/param_box");
  fam.sitting_radius = get_number_or(j, "sitting_radius", 0.1);
  const int k = fam.param_box.dim();
  const int d = atlas->dim();

  const json& jp = field(j, "pieces", fp);
  if (!jp.is_array() || jp.empty()) throw ConfigError(fp + "/pieces", "expected a list");
  for (std::size_t i = 0; i < jp.size(); ++i) {
    const std::string pp = fp + "/pieces/" + std::to_string(i);
    const json& iv = field(jp[i], "interval", pp);
    if (!iv.is_array() || iv.size() != 2) throw ConfigError(pp + "/interval", "expected [t0, t1]");
    fam.pieces.push_back({get_string(jp[i], "chart", pp),
                          parse_dsl(get_string(jp[i], "map", pp), k + 1, dsl::Shape::vector(d),
                                    pp + "/map"),
                          iv[0].get<double>(), iv[1].get<double>()});
  }
  return fam;
}

GaugeMorphism load_morphism_file(const std::string& filename) {
  const json root = parse_file(filename);
  const json& j = field(root, "morphism", filename);
  const std::string mp = filename + "/morphism";
  const json& jh = field(j, "h", mp);
  if (!jh.is_object() || jh.empty())
    throw ConfigError(mp + "/h", "expected chart -> group-valued expression map");

  GaugeMorphism out;
  for (const auto& [chart, expr] : jh.items()) {
    if (!expr.is_string()) throw ConfigError(mp + "/h/" + chart, "expected a DSL string");
    try {
      out.h.emplace(chart, dsl::parse_expr(expr.get<std::string>(), 2));
    } catch (const Error& e) {
      throw ConfigError(mp + "/h/" + chart, e.what());
    }
  }
  return out;
}

AccessPaths load_access_file(const std::string& filename, AtlasPtr atlas) {
  const json root = parse_file(filename);
  const json& j = field(root, "access", filename);
  const std::string ap = filename + "/access";

  AccessPaths out;
  const json& jb = field(j, "basepoint", ap);
  out.basepoint = {get_string(jb, "chart", ap + "/basepoint"),
                   parse_coords(field(jb, "coords", ap + "/basepoint"), ap + "/basepoint/coords")};

  const json& jt = field(j, "to_anchor", ap);
  if (!jt.is_object()) throw ConfigError(ap + "/to_anchor", "expected chart -> path map");
  for (const auto& [chart, pj] : jt.items())
    out.to_anchor.emplace(chart, load_path_json(pj, ap + "/to_anchor/" + chart, atlas));
  return out;
}

json sampled_cocycle_to_json(const SampledCocycle& sc, const Atlas& atlas) {
  json out;
  out["schema_version"] = 1;
  json conn;
  conn["group"] = lie::GroupSpec(sc.group).str();
  json entries = json::array();
  for (const auto& st : sc.transitions) {
    const Overlap& o = atlas.overlaps()[static_cast<std::size_t>(st.overlap_index)];
    json e;
    e["overlap"] = st.overlap_index;
    e["from"] = o.from;
    e["to"] = o.to;
    json samples = json::array();
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      json s;
      s["point"] = std::vector<double>(st.points[i].data(),
                                       st.points[i].data() + st.points[i].size());
      const Eigen::MatrixXd m = st.values[i].matrix.real();
      json rows = json::array();
      for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
      }
      s["matrix"] = rows;
      samples.push_back(s);
    }
    e["samples"] = samples;
    entries.push_back(e);
  }
  conn["transitions_sampled"] = entries;
  out["connection"] = conn;
  return out;
}

SampledCocycle sampled_cocycle_from_json(const json& j, const std::string& where) {
  const json& jc = field(j, "connection", where);
  SampledCocycle out;
  try {
    out.group = lie::GroupSpec::from_string(get_string(jc, "group", where + "/connection"));
  } catch (const Error& e) {
    throw ConfigError(where + "/connection/group", e.what());
  }
  const json& entries = field(jc, "transitions_sampled", where + "/connection");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string ep = where + "/connection/transitions_sampled/" + std::to_string(k);
    SampledTransition st;
    st.overlap_index = field(entries[k], "overlap", ep).get<int>();
    for (const json& s : field(entries[k], "samples", ep)) {
      st.points.push_back(parse_coords(s.at("point"), ep + "/point"));
      const json& rows = s.at("matrix");
      const int n = out.group.dim_matrix();
      Eigen::MatrixXcd m(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
      st.values.push_back({out.group, m});
    }
    out.transitions.push_back(std::move(st));
  }
  return out;
}

}  // namespace holo::config
