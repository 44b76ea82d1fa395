// holo: batch front end for the transport engine.  Loads JSON configs, runs
// transports, holonomy sweeps, reconstructions and cocycle checks, and emits
// JSON/CSV reports.  Identical config + seed produces byte-identical output
// except for the generated_at line.
//
// Exit codes: 0 ok, 1 error, 2 ok with an accuracy warning attached.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "holo/config.hpp"

namespace {

using holo::AtlasPtr;
using holo::ConnectionData;
using holo::Path;
using nlohmann::ordered_json;

// Every numeric default in one place (see the README table).
struct Defaults {
  static constexpr int steps = 1024;
  static constexpr double h = 1e-3;
  static constexpr int samples = 64;
  static constexpr int validation_samples = 256;  // validate / cocycle-check
  static constexpr int grid = 33;
  static constexpr long seed = 0;
};

struct RunConfig {
  std::filesystem::path config_dir;
  nlohmann::json raw;

  int steps = Defaults::steps;
  double h = Defaults::h;
  int samples = Defaults::samples;
  bool samples_explicit = false;
  int grid = Defaults::grid;
  long seed = Defaults::seed;
  std::optional<double> tol;

  int validation_samples() const {
    return samples_explicit ? samples : Defaults::validation_samples;
  }

  std::string file(const char* key) const {
    if (!raw.contains(key))
      throw holo::ConfigError(std::string("config/") + key, "missing input file reference");
    const std::string rel = raw.at(key).get<std::string>();
    return (config_dir / rel).string();
  }
  bool has(const char* key) const { return raw.contains(key); }
};

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw holo::ConfigError(path, "cannot open config");
  RunConfig rc;
  try {
    rc.raw = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw holo::ConfigError(path, e.what());
  }
  rc.config_dir = std::filesystem::path(path).parent_path();
  if (rc.raw.contains("steps")) rc.steps = rc.raw.at("steps").get<int>();
  if (rc.raw.contains("h")) rc.h = rc.raw.at("h").get<double>();
  if (rc.raw.contains("samples")) {
    rc.samples = rc.raw.at("samples").get<int>();
    rc.samples_explicit = true;
  }
  if (rc.raw.contains("grid")) rc.grid = rc.raw.at("grid").get<int>();
  if (rc.raw.contains("seed")) rc.seed = rc.raw.at("seed").get<long>();
  if (rc.raw.contains("tol")) rc.tol = rc.raw.at("tol").get<double>();
  return rc;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

ordered_json reproducibility(const std::string& command, const RunConfig& rc) {
  ordered_json r;
  r["tool"] = "holo";
  r["version"] = HOLO_VERSION;
  r["command"] = command;
  r["seed"] = rc.seed;
  ordered_json params;
  params["steps"] = rc.steps;
  params["h"] = rc.h;
  params["samples"] = rc.samples;
  params["grid"] = rc.grid;
  if (rc.tol) params["tol"] = *rc.tol;
  r["parameters"] = params;
  return r;
}

void write_output(const std::string& out_path, ordered_json doc) {
  doc["generated_at"] = timestamp_utc();
  if (out_path.empty() || out_path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw holo::Error("cannot write " + out_path);
  out << doc.dump(2) << "\n";
}

ordered_json point_json(const holo::PathPoint& p) {
  ordered_json j;
  j["chart"] = p.chart;
  j["coords"] = std::vector<double>(p.coords.data(), p.coords.data() + p.coords.size());
  return j;
}

ordered_json matrix_json(const holo::lie::Mat& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c).real());
    rows.push_back(row);
  }
  return rows;
}

bool matrix_has_imag(const holo::lie::Mat& m) { return m.imag().norm() > 0.0; }

ordered_json transport_json(const holo::TransportResult& t) {
  ordered_json j;
  j["source"] = point_json(t.source);
  j["target"] = point_json(t.target);
  j["chart"] = t.target.chart;
  j["matrix"] = matrix_json(t.element.matrix);
  if (matrix_has_imag(t.element.matrix)) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < t.element.matrix.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (int c = 0; c < t.element.matrix.cols(); ++c)
        row.push_back(t.element.matrix(r, c).imag());
      rows.push_back(row);
    }
    j["matrix_im"] = rows;
  }
  j["rotation_angle"] = holo::lie::rotation_angle(t.element);
  j["error_estimate"] = t.error_estimate;
  j["accuracy_warning"] = t.accuracy_warning;
  j["steps"] = t.steps;
  return j;
}

int cmd_transport(const RunConfig& rc, const std::string& out, bool loop) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  const Path path = holo::config::load_path_file(rc.file("path"), conn.atlas);
  const holo::TransportResult t = loop ? holo::holonomy(conn.conn, path, rc.steps)
                                       : holo::transport(conn.conn, path, rc.steps);
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["result"] = transport_json(t);
  doc["reproducibility"] = reproducibility(loop ? "holonomy" : "transport", rc);
  write_output(out, std::move(doc));
  return t.accuracy_warning ? 2 : 0;
}

int cmd_sweep(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  const holo::PathFamily fam = holo::config::load_family_file(rc.file("family"), conn.atlas);
  const holo::FamilyTable table = holo::family_transport(conn.conn, fam, rc.samples, rc.steps);

  std::ostringstream csv;
  csv << "# holo " << HOLO_VERSION << " sweep seed=" << rc.seed << " steps=" << rc.steps
      << " grid=" << rc.samples << "\n";
  const int n = conn.conn.group().dim_matrix();
  csv << "u";
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) csv << ",log_" << r << c;
  csv << ",angle\n";

  // angles unwrap continuously along the family (each entry picks the
  // 2 pi branch nearest its predecessor), so smooth families stay smooth
  std::vector<double> angles;
  for (const auto& e : table.entries) {
    double a = holo::lie::rotation_angle(e.result.element);
    if (!angles.empty()) {
      const double turns = std::round((angles.back() - a) / (2 * M_PI));
      a += 2 * M_PI * turns;
    }
    angles.push_back(a);
  }

  bool warned = false;
  char num[40];
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    warned = warned || e.result.accuracy_warning;
    std::snprintf(num, sizeof(num), "%.17g", e.param[0]);
    csv << num;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        csv << ",";
        if (e.log) {
          std::snprintf(num, sizeof(num), "%.17g", (*e.log)(r, c).real());
          csv << num;
        }
      }
    std::snprintf(num, sizeof(num), "%.17g", angles[i]);
    csv << "," << num << "\n";
  }
  std::snprintf(num, sizeof(num), "%.17g", table.smoothness_coefficient);
  csv << "# smoothness_coefficient=" << num << "\n";
  csv << "# generated_at=" << timestamp_utc() << "\n";

  if (out.empty() || out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream f(out);
    if (!f) throw holo::Error("cannot write " + out);
    f << csv.str();
  }
  return warned ? 2 : 0;
}

int cmd_reconstruct(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  const holo::RoundtripReport rep =
      holo::roundtrip_check(conn.conn, rc.h, rc.samples, rc.steps);

  ordered_json charts;
  for (const auto& [chart, rows] : rep.tables) {
    ordered_json rj = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json r;
      r["h"] = row.h;
      r["max_error"] = row.max_error;
      rj.push_back(r);
    }
    charts[chart]["rows"] = rj;
    charts[chart]["richardson_ratios"] = rep.ratios.at(chart);
  }
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["result"]["charts"] = charts;
  doc["result"]["worst_error_at_finest"] = rep.worst_error_at_finest;
  doc["reproducibility"] = reproducibility("reconstruct", rc);
  write_output(out, std::move(doc));
  return 0;
}

int cmd_extract(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  const holo::AccessPaths access =
      holo::config::load_access_file(rc.file("access"), conn.atlas);
  const holo::CocycleExtractor ex(holo::tp(conn.conn, rc.steps), access);

  const holo::SampledCocycle sc = holo::extract_cocycle(ex, rc.samples);
  ordered_json doc;
  doc["schema_version"] = 1;
  const nlohmann::json cocycle = holo::config::sampled_cocycle_to_json(sc, *conn.atlas);
  doc["result"] = ordered_json::parse(cocycle.dump());
  doc["result"]["diagnostics"]["cocycle_residual"] =
      holo::extracted_cocycle_residual(ex, std::max(2, rc.samples / 8));
  if (!conn.conn.transitions().empty()) {
    const holo::CohomologyReport ch =
        holo::cohomology_residual(ex, conn.conn, std::max(2, rc.samples / 8));
    doc["result"]["diagnostics"]["cohomology_residual"] = ch.worst;
    doc["result"]["diagnostics"]["cohomology_samples"] = ch.compared;
  }
  doc["reproducibility"] = reproducibility("extract-cocycle", rc);
  write_output(out, std::move(doc));
  return 0;
}

int cmd_cocycle_check(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  ordered_json doc;
  doc["schema_version"] = 1;

  const holo::DescentReport descent =
      holo::validate_descent(conn.conn, rc.validation_samples());
  ordered_json dj;
  dj["worst_cocycle"] = descent.worst_cocycle;
  dj["cocycle_vacuous"] = descent.cocycle_vacuous;
  dj["worst_compatibility"] = descent.worst_compatibility;
  dj["worst_inverse"] = descent.worst_inverse;
  dj["worst_membership"] = descent.worst_membership;
  doc["result"]["descent"] = dj;

  if (conn.conn.has_local_forms()) {
    const holo::TransCocycleObject obj = holo::hol_gamma(conn.conn, rc.steps);
    const holo::CocycleCheckReport rep = holo::check_cocycle(obj, rc.samples);
    ordered_json tj;
    tj["worst_cocycle"] = rep.worst_cocycle;
    tj["cocycle_vacuous"] = rep.cocycle_vacuous;
    tj["worst_naturality"] = rep.worst_naturality;
    doc["result"]["transport_object"] = tj;
  }
  doc["reproducibility"] = reproducibility("cocycle-check", rc);
  write_output(out, std::move(doc));
  return 0;
}

int cmd_thin(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  const holo::Homotopy h = holo::config::load_homotopy_file(rc.file("homotopy"), conn.atlas);
  holo::check_homotopy_boundary(h);
  const holo::ThinOutcome res = holo::certify_thin(h, rc.grid, rc.tol.value_or(-1.0));

  ordered_json doc;
  doc["schema_version"] = 1;
  ordered_json r;
  r["certified"] = res.certified;
  r["grid"] = res.grid;
  r["tol"] = res.tol;
  r["max_sigma2"] = res.max_sigma2;
  r["max_jacobian_norm"] = res.max_jacobian_norm;
  if (!res.certified) {
    r["refusal"]["s"] = res.worst_s;
    r["refusal"]["t"] = res.worst_t;
    r["refusal"]["sigma2"] = res.max_sigma2;
  }
  doc["result"] = r;
  doc["reproducibility"] = reproducibility("thin-check", rc);
  write_output(out, std::move(doc));
  return 0;
}

int cmd_naturality(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  const auto conn2 = rc.has("connection2")
                         ? holo::config::load_connection_file(rc.file("connection2"))
                         : conn;
  const holo::GaugeMorphism f = holo::config::load_morphism_file(rc.file("morphism"));
  const Path path = holo::config::load_path_file(rc.file("path"), conn.atlas);
  const double residual = holo::check_naturality(f, conn.conn, conn2.conn, path, rc.steps);

  ordered_json doc;
  doc["schema_version"] = 1;
  doc["result"]["residual"] = residual;
  doc["reproducibility"] = reproducibility("naturality", rc);
  write_output(out, std::move(doc));
  return 0;
}

int cmd_validate(const RunConfig& rc, const std::string& out) {
  const auto conn = holo::config::load_connection_file(rc.file("connection"));
  ordered_json doc;
  doc["schema_version"] = 1;

  const holo::Atlas::InverseReport inv =
      conn.atlas->validate_inverses(rc.validation_samples());
  doc["result"]["atlas"]["worst_inverse_residual"] = inv.worst_residual;
  if (!inv.where.empty()) doc["result"]["atlas"]["where"] = inv.where;

  const holo::CoverGroupoidReport cg =
      holo::check_cover_groupoid(*conn.atlas, rc.validation_samples());
  doc["result"]["cover_groupoid"]["worst_simplicial"] = cg.worst_simplicial;
  doc["result"]["cover_groupoid"]["composable_samples"] = cg.composable_samples;

  const holo::DescentReport rep = holo::validate_descent(conn.conn, rc.validation_samples());
  ordered_json dj;
  dj["worst_cocycle"] = rep.worst_cocycle;
  dj["cocycle_vacuous"] = rep.cocycle_vacuous;
  dj["worst_compatibility"] = rep.worst_compatibility;
  dj["worst_membership"] = rep.worst_membership;
  doc["result"]["descent"] = dj;

  if (rc.has("path")) {
    holo::config::load_path_file(rc.file("path"), conn.atlas);  // throws if invalid
    doc["result"]["path"] = "valid";
  }
  doc["reproducibility"] = reproducibility("validate", rc);
  write_output(out, std::move(doc));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel transport, holonomy and descent-data engine"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h / --h for the fd scale

  std::string config_path;
  std::string out_path;
  std::optional<int> steps_flag, samples_flag;
  std::optional<double> h_flag, tol_flag;
  std::optional<long> seed_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", config_path, "run config file (JSON)")->required();
    sub->add_option("--out", out_path, "output path ('-' for stdout)");
    sub->add_option("--steps", steps_flag, "integrator steps per unit parameter");
    sub->add_option("--h", h_flag, "finite-difference scale");
    sub->add_option("--samples", samples_flag, "sample count per region");
    sub->add_option("--seed", seed_flag, "seed recorded in reports");
    sub->add_option("--tol", tol_flag, "tolerance override");
  };

  CLI::App* transport = app.add_subcommand("transport", "transport along a path");
  CLI::App* holonomy = app.add_subcommand("holonomy", "transport around a loop");
  CLI::App* sweep = app.add_subcommand("sweep", "family transport table (CSV)");
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "connection from transport");
  CLI::App* extract = app.add_subcommand("extract-cocycle", "transition data from transport");
  CLI::App* cocycle = app.add_subcommand("cocycle-check", "descent/cocycle residuals");
  CLI::App* thin = app.add_subcommand("thin-check", "thin-homotopy certificate");
  CLI::App* naturality = app.add_subcommand("naturality", "gauge morphism residual");
  CLI::App* validate = app.add_subcommand("validate", "validate config data");
  for (CLI::App* sub :
       {transport, holonomy, sweep, reconstruct, extract, cocycle, thin, naturality, validate})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig rc = load_run_config(config_path);
    if (steps_flag) rc.steps = *steps_flag;
    if (h_flag) rc.h = *h_flag;
    if (samples_flag) {
      rc.samples = *samples_flag;
      rc.samples_explicit = true;
    }
    if (seed_flag) rc.seed = *seed_flag;
    if (tol_flag) rc.tol = *tol_flag;
    if (rc.steps < 16) throw holo::Error("steps must be >= 16");
    if (rc.samples < 1) throw holo::Error("samples must be >= 1");

    if (app.got_subcommand(transport)) return cmd_transport(rc, out_path, false);
    if (app.got_subcommand(holonomy)) return cmd_transport(rc, out_path, true);
    if (app.got_subcommand(sweep)) return cmd_sweep(rc, out_path);
    if (app.got_subcommand(reconstruct)) return cmd_reconstruct(rc, out_path);
    if (app.got_subcommand(extract)) return cmd_extract(rc, out_path);
    if (app.got_subcommand(cocycle)) return cmd_cocycle_check(rc, out_path);
    if (app.got_subcommand(thin)) return cmd_thin(rc, out_path);
    if (app.got_subcommand(naturality)) return cmd_naturality(rc, out_path);
    if (app.got_subcommand(validate)) return cmd_validate(rc, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
