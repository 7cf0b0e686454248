#include "membrane/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "membrane/fixtures.hpp"
#include "membrane/io.hpp"
#include "membrane/membrane.hpp"

namespace membrane::cli {

namespace {

struct GenConfig {
  std::string shape = "disc";
  int resolution = 16;
  double colatitude = kPi<double> / 2;
  double inner_radius = 0.5;
  double scale = 1.0;
  std::string out;
};

struct SpectrumConfig {
  std::string mesh;
  std::string bc = "dirichlet";
  int k = 4;
  std::string out;
  std::string solver = "auto";
  bool eigenfunctions = false;
  bool lumped = false;
};

struct VerifyConfig {
  std::string mesh;
  std::string map = "file";
  std::string degree = "auto";
  std::string out;
  std::string csv;
};

struct BatchConfig {
  int refine_levels = 3;
  int base_resolution = 8;
  int random = 3;
  std::string csv;
  std::string json;
};

FemOptions fem_options(const std::string& solver, bool lumped) {
  FemOptions opt;
  opt.mass = lumped ? MassKind::lumped : MassKind::consistent;
  if (solver == "dense") opt.eigen.method = EigenMethod::dense;
  if (solver == "shift-invert") opt.eigen.method = EigenMethod::shift_invert;
  return opt;
}

MappedSurfaced generate(const GenConfig& c) {
  if (c.shape == "disc") return disc_fixture().make(c.resolution);
  if (c.shape == "cap") return cap_fixture(c.colatitude, "cap").make(c.resolution);
  if (c.shape == "hemisphere") return hemisphere_fixture().make(c.resolution);
  if (c.shape == "branched") return branched_disc_fixture().make(c.resolution);
  if (c.shape == "conformal-hemisphere") return stereographic_hemisphere_fixture().make(c.resolution);
  if (c.shape == "bump") return bump_fixture({0.5, 0.0}, 1.0, 0.3, "bump").make(c.resolution);
  if (c.shape == "annulus") {
    auto mesh = generate_annulus(c.inner_radius, c.resolution);
    return {std::move(mesh), MapSampled{}};
  }
  if (c.shape == "square") {
    auto mesh = generate_square(c.resolution);
    return {std::move(mesh), MapSampled{}};
  }
  throw DomainError("unknown shape " + c.shape);
}

int run_gen(const GenConfig& c, std::ostream& out) {
  MappedSurfaced s = generate(c);
  if (c.scale != 1.0) s.mesh = s.mesh.scaled(c.scale);
  const MapSampled* map = s.map.values.size() > 0 ? &s.map : nullptr;
  io::write_mesh(c.out, s.mesh, map);
  const Topology t = topology(s.mesh);
  io::Json summary = {{"out", c.out},
                      {"vertices", s.mesh.vertex_count()},
                      {"triangles", s.mesh.triangle_count()},
                      {"area", total_area(s.mesh)},
                      {"genus", t.genus},
                      {"contours", t.contours},
                      {"euler_characteristic", t.euler_characteristic}};
  out << io::dump(summary);
  return 0;
}

int run_spectrum(const SpectrumConfig& c, std::ostream& out) {
  const io::MeshDocument doc = io::read_mesh(c.mesh);
  const FemOptions opt = fem_options(c.solver, c.lumped);
  SpectralResult<double> result = c.bc == "neumann" ? solve_neumann(doc.mesh, c.k, opt)
                                                    : solve_dirichlet(doc.mesh, c.k, opt);
  result.mesh_id = c.mesh;
  const std::string text = io::dump(io::to_json(result, c.eigenfunctions));
  if (c.out.empty()) {
    out << text;
  } else {
    io::write_text(c.out, text);
  }
  return 0;
}

int run_verify(const VerifyConfig& c, std::ostream& out, std::ostream& err) {
  const io::MeshDocument doc = io::read_mesh(c.mesh);
  MapSampled f;
  if (c.map == "id") {
    f = identity_map(doc.mesh);
  } else if (c.map == "stereographic") {
    f = stereographic_map(doc.mesh);
  } else {
    if (!doc.map) throw DomainError(c.mesh + " carries no map; use --map id or --map stereographic");
    f = *doc.map;
  }
  VerifyOptions opt;
  if (c.degree != "auto") {
    try {
      opt.degree = std::stoi(c.degree);
    } catch (const std::exception&) {
      throw DomainError("--degree must be 'auto' or a positive integer");
    }
  }
  const auto report = verify_inequality(doc.mesh, f, opt);
  const std::string text = io::dump(io::to_json(report));
  if (c.out.empty()) {
    out << text;
  } else {
    io::write_text(c.out, text);
  }
  if (!c.csv.empty()) io::write_text(c.csv, io::csv_header() + io::csv_row(c.mesh, 0, 0, report));
  if (report.failed) {
    err << io::dump(io::error_json("verify", report.failure));
    return 1;
  }
  return 0;
}

std::vector<Fixture> batch_fixtures(int random) {
  std::vector<Fixture> fx;
  fx.push_back(disc_fixture());
  fx.push_back(hemisphere_fixture());
  fx.push_back(cap_fixture(kPi<double> / 6, "cap_pi_6"));
  fx.push_back(cap_fixture(kPi<double> / 3, "cap_pi_3"));
  fx.push_back(stereographic_hemisphere_fixture());
  fx.push_back(bump_fixture({0.5, 0.0}, 1.0, 0.3, "bump"));
  for (auto& f : random_conformal_fixtures(random, 1961)) fx.push_back(std::move(f));
  fx.push_back(branched_disc_fixture());
  return fx;
}

int run_batch(const BatchConfig& c, std::ostream& out, std::ostream& err) {
  const std::vector<Fixture> fixtures = batch_fixtures(c.random);
  // Level l runs at base << l. Every reported level gets its budget as the
  // finer member of the pair (l - 1, l); level -1 at base / 2 exists only for that.
  const auto resolution = [&](int level) { return level < 0 ? c.base_resolution / 2 : c.base_resolution << level; };
  const int first = -1;
  const auto slots = static_cast<std::size_t>(c.refine_levels + 1);

  struct Job {
    std::size_t fixture;
    int level;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    for (int l = first; l < c.refine_levels; ++l) jobs.push_back({f, l});
  }
  std::vector<VerificationReport<double>> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const MappedSurfaced s = fixtures[jobs[j].fixture].make(resolution(jobs[j].level));
        reports[j] = verify_inequality(s.mesh, s.map);
      } catch (const Error& e) {
        reports[j].failed = true;
        reports[j].failure = e.kind() + ": " + e.what();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(thread_limit(), static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv = io::csv_header();
  io::Json rows = io::Json::array();
  bool any_failed = false;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    for (int l = 0; l < c.refine_levels; ++l) {
      const std::size_t j = f * slots + static_cast<std::size_t>(l - first);
      VerificationReport<double> r = reports[j];
      const auto& coarser = reports[j - 1];
      if (!r.failed && !coarser.failed) r.budget = richardson_budget(coarser, r);
      any_failed = any_failed || r.failed;
      const std::string& name = fixtures[f].name;
      csv += io::csv_row(name, l, resolution(l), r);
      io::Json row = io::to_json(r);
      row["fixture"] = name;
      row["level"] = l;
      row["resolution"] = resolution(l);
      rows.push_back(std::move(row));
    }
  }
  if (!c.csv.empty()) io::write_text(c.csv, csv);
  if (!c.json.empty()) io::write_text(c.json, io::dump(rows));
  if (c.csv.empty() && c.json.empty()) out << csv;
  if (any_failed) {
    err << io::dump(io::error_json("batch", "one or more fixtures failed; see the failure column"));
    return 1;
  }
  return 0;
}

}  // namespace

unsigned thread_limit() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MEMBRANE_SPECTRA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  return n;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet/Neumann Laplace-Beltrami spectra of bordered surfaces and the "
               "transplantation eigenvalue inequalities",
               "membrane-spectra"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a fixture mesh as JSON");
  gen_cmd->add_option("--shape", gen.shape, "disc | cap | hemisphere | annulus | branched | "
                                            "conformal-hemisphere | bump | square")
      ->check(CLI::IsMember({"disc", "cap", "hemisphere", "annulus", "branched", "conformal-hemisphere", "bump",
                             "square"}));
  gen_cmd->add_option("--resolution", gen.resolution, "rings / radial layers")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--colatitude", gen.colatitude, "cap colatitude in radians");
  gen_cmd->add_option("--inner-radius", gen.inner_radius, "annulus inner radius");
  gen_cmd->add_option("--scale", gen.scale, "multiply every edge length")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen.out, "output mesh JSON")->required();

  SpectrumConfig spectrum;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Dirichlet or Neumann eigenvalues of a mesh");
  spectrum_cmd->add_option("mesh", spectrum.mesh, "mesh JSON")->required();
  spectrum_cmd->add_option("--bc", spectrum.bc, "dirichlet | neumann")->check(CLI::IsMember({"dirichlet", "neumann"}));
  spectrum_cmd->add_option("--k", spectrum.k, "number of eigenpairs")->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--out", spectrum.out, "output JSON (stdout when omitted)");
  spectrum_cmd->add_option("--solver", spectrum.solver, "auto | dense | shift-invert")
      ->check(CLI::IsMember({"auto", "dense", "shift-invert"}));
  spectrum_cmd->add_flag("--eigenfunctions", spectrum.eigenfunctions, "export per-vertex eigenfunctions");
  spectrum_cmd->add_flag("--lumped", spectrum.lumped, "lumped instead of consistent mass");

  VerifyConfig ver;
  auto* ver_cmd = app.add_subcommand("verify", "check both eigenvalue inequalities on a mesh and map");
  ver_cmd->add_option("mesh", ver.mesh, "mesh JSON")->required();
  ver_cmd->add_option("--map", ver.map, "file | id | stereographic")
      ->check(CLI::IsMember({"file", "id", "stereographic"}));
  ver_cmd->add_option("--degree", ver.degree, "auto | N");
  ver_cmd->add_option("--out", ver.out, "report JSON (stdout when omitted)");
  ver_cmd->add_option("--csv", ver.csv, "also write a one-row CSV");

  BatchConfig batch;
  auto* batch_cmd = app.add_subcommand("batch", "verify the built-in fixture suite across refinements");
  batch_cmd->add_option("--refine-levels", batch.refine_levels, "number of refinement levels")
      ->check(CLI::PositiveNumber);
  batch_cmd->add_option("--base-resolution", batch.base_resolution, "rings at level 0 (>= 4)")
      ->check(CLI::Range(4, 1 << 16));
  batch_cmd->add_option("--random", batch.random, "number of random conformal discs")
      ->check(CLI::NonNegativeNumber);
  batch_cmd->add_option("--csv", batch.csv, "slack table CSV");
  batch_cmd->add_option("--json", batch.json, "slack table JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << io::dump(io::error_json("usage", e.what()));
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen, out);
    if (spectrum_cmd->parsed()) return run_spectrum(spectrum, out);
    if (ver_cmd->parsed()) return run_verify(ver, out, err);
    return run_batch(batch, out, err);
  } catch (const Error& e) {
    err << io::dump(io::error_json(e.kind(), e.what()));
    return 1;
  }
}

}  // namespace membrane::cli
