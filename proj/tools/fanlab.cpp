// fanlab: command-line surface for the fan/relation dynamics library.
//
// Subcommands: density, mahavier, orbit, transitive-point, sigma-chain,
// render, verify.  Results go to stdout (or --out); progress/diagnostics go
// to stderr.  Exit codes: 0 success, 1 usage/domain error, 2 witness not
// found / infeasible or missed target, 3 budget exceeded, 4 I/O error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fanlab/density.hpp"
#include "fanlab/errors.hpp"
#include "fanlab/fans.hpp"
#include "fanlab/mahavier.hpp"
#include "fanlab/maps.hpp"
#include "fanlab/render.hpp"
#include "fanlab/symbolic.hpp"
#include "fanlab/transitivity.hpp"
#include "fanlab/verification.hpp"

namespace {

using nlohmann::json;

int exit_code_for(fanlab::ErrorCode c) {
  switch (c) {
    case fanlab::ErrorCode::WitnessNotFound:
    case fanlab::ErrorCode::InfeasibleTarget:
      return 2;
    case fanlab::ErrorCode::BudgetExceeded:
      return 3;
    default:
      return 1;
  }
}

int thread_cap() {
  if (const char* env = std::getenv("FANLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Catalog name or path to a family JSON file.
fanlab::MapFamily load_family(const std::string& source) {
  if (source.size() > 5 && source.substr(source.size() - 5) == ".json") {
    std::ifstream in(source);
    if (!in) fanlab::fail(fanlab::ErrorCode::ParseError, "cannot open " + source);
    json j;
    in >> j;
    return fanlab::family_from_json(j);
  }
  return fanlab::catalog(source);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fanlab::fail(fanlab::ErrorCode::ParseError, "cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::vector<fanlab::CylinderTarget> targets_from_json(const json& j,
                                                      const fanlab::Alphabet& ab) {
  std::vector<fanlab::CylinderTarget> out;
  if (!j.contains("targets") || !j["targets"].is_array())
    fanlab::fail(fanlab::ErrorCode::ParseError, "targets file needs a 'targets' array");
  for (const json& t : j["targets"]) {
    fanlab::CylinderTarget target;
    if (t.contains("word")) {
      std::vector<int> syms = t["word"].get<std::vector<int>>();
      target.word = fanlab::FiniteWord(ab, std::move(syms));
    }
    if (t.contains("box"))
      for (const json& iv : t["box"])
        target.box.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    if (t.contains("eps")) target.eps = t["eps"].get<double>();
    target.require_nonempty();
    out.push_back(std::move(target));
  }
  return out;
}

/// Writes to --out when given, else stdout.  Open failure exits 4.
int write_result(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file " << out_path << "\n";
    return 4;
  }
  out << content;
  if (!out) {
    std::cerr << "error: write failed for " << out_path << "\n";
    return 4;
  }
  return 0;
}

// --- density ---------------------------------------------------------------

struct DensityArgs {
  std::string lemma;
  std::string family = "definicija";
  double x = 0.0, z = 0.0, eps = 0.0;
  long long bound = 1LL << 20;
  long long h_bound = 2000;
};

int run_density(const DensityArgs& a) {
  fanlab::DensityWitness wit;
  if (a.lemma == "pow23")
    wit = fanlab::search_pow23(a.x, a.z, a.eps, a.bound);
  else if (a.lemma == "half-pow")
    wit = fanlab::search_half_pow(a.x, a.z, a.eps, a.bound);
  else if (a.lemma == "propertyL")
    wit = fanlab::search_propertyL(load_family(a.family), a.x, a.z, a.eps, a.bound);
  else if (a.lemma == "gabi")
    wit = fanlab::search_gabi(a.x, a.z, a.eps, a.bound, a.h_bound);
  else
    fanlab::fail(fanlab::ErrorCode::UnknownName, "unknown lemma " + a.lemma);
  std::cout << wit.to_json().dump(2) << "\n";
  return 0;
}

// --- mahavier --------------------------------------------------------------

struct MahavierArgs {
  std::string relation = "H";
  double start = 1.0;
  int depth = 1;
  std::uint64_t budget = 1000000;
  std::string out;
};

int run_mahavier(const MahavierArgs& a) {
  fanlab::ClosedRelation F(load_family(a.relation));
  std::vector<fanlab::MahavierWord> words =
      fanlab::enumerate_mahavier(F, a.start, a.depth, a.budget);
  std::string csv;
  for (const fanlab::MahavierWord& w : words) csv += fanlab::mahavier_to_csv(w) + "\n";
  std::cerr << "enumerated " << words.size() << " words\n";
  return write_result(a.out, csv);
}

// --- orbit -----------------------------------------------------------------

struct OrbitArgs {
  std::string family = "definicija";
  std::string targets_path;
  std::string prefix;  // leading symbols as a digit string
  int tail = 1;
  double x0 = 0.5;
  long steps = 0;
  std::string out;
};

int run_orbit(const OrbitArgs& a) {
  fanlab::MapFamily fam = load_family(a.family);
  std::vector<fanlab::CylinderTarget> targets =
      targets_from_json(load_json_file(a.targets_path), fam.alphabet());
  std::vector<int> syms;
  for (char c : a.prefix) {
    if (c < '1' || c > '9') fanlab::fail(fanlab::ErrorCode::ParseError, "bad prefix digit");
    syms.push_back(c - '0');
  }
  fanlab::SkewSystem sys{fam, fanlab::SkewSide::OneSided};
  fanlab::SkewStateC s0{
      fanlab::OneSidedWord(fanlab::FiniteWord(fam.alphabet(), std::move(syms)), a.tail),
      a.x0};
  std::vector<fanlab::SkewStateC> orbit = fanlab::skew_orbit(sys, s0, a.steps);
  fanlab::CoverageReport rep = fanlab::orbit_coverage(orbit, targets);
  int rc = write_result(a.out, rep.to_csv());
  if (rc != 0) return rc;
  return rep.fraction_hit == 1.0 ? 0 : 2;
}

// --- transitive-point ------------------------------------------------------

struct TransitiveArgs {
  std::string family = "definicija";
  std::string targets_path;
  double x0 = 0.5;
  long long bound = 1LL << 22;
  std::string out;
};

int run_transitive_point(const TransitiveArgs& a) {
  fanlab::MapFamily fam = load_family(a.family);
  std::vector<fanlab::CylinderTarget> raw =
      targets_from_json(load_json_file(a.targets_path), fam.alphabet());
  std::vector<std::pair<fanlab::CylinderTarget, double>> targets;
  std::vector<double> eps_schedule;
  for (fanlab::CylinderTarget& t : raw) {
    if (t.box.empty() || !(t.eps > 0.0))
      fanlab::fail(fanlab::ErrorCode::ParseError,
                   "transitive-point targets need a box (t value) and eps > 0");
    double ti = 0.5 * (t.box[0].first + t.box[0].second);
    eps_schedule.push_back(t.eps);
    targets.push_back({std::move(t), ti});
  }
  fanlab::TransitivePoint tp =
      fanlab::build_transitive_point(fam, targets, eps_schedule, a.x0, a.bound);

  // Report: hit step and the distance to the target value at that step.
  std::string csv = "target_id,hit_step,hit_distance\n";
  double log_v = std::log(a.x0);
  std::size_t cursor = 0;
  const std::vector<int>& syms = tp.point.prefix.symbols;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    while (cursor < static_cast<std::size_t>(tp.hit_times[i]))
      log_v = fanlab::detail::apply_map_log(fam.map(syms[cursor++]), log_v);
    double d = std::abs(std::exp(log_v) - targets[i].second);
    csv += std::to_string(i) + "," + std::to_string(tp.hit_times[i]) + "," +
           std::to_string(d) + "\n";
  }
  std::cerr << "prefix length " << syms.size() << "\n";
  return write_result(a.out, csv);
}

// --- sigma-chain -----------------------------------------------------------

struct SigmaArgs {
  std::string relation = "H";
  std::string targets_path;
  long long bound = 1LL << 20;
  std::string out;
};

int run_sigma_chain(const SigmaArgs& a) {
  fanlab::ClosedRelation F(load_family(a.relation));
  std::vector<fanlab::CylinderTarget> targets =
      targets_from_json(load_json_file(a.targets_path), F.branches().alphabet());
  fanlab::SigmaChain chain = fanlab::build_sigma_chain(F, targets, a.bound);
  fanlab::MahavierWord stitched = fanlab::stitch_chain(chain, F);
  std::vector<long long> offsets = fanlab::chain_shift_offsets(chain);

  std::string csv = "target_id,hit_step,hit_distance\n";
  bool all_hit = true;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    fanlab::MahavierWord s = stitched;
    for (long long step = 0; step < offsets[k]; ++step)
      s = fanlab::shift_forward_truncated(s);
    double d = 0.0;
    bool hit = fanlab::word_in_target(s, targets[k], &d);
    all_hit = all_hit && hit;
    csv += std::to_string(k) + "," + (hit ? std::to_string(offsets[k]) : "-1") + "," +
           std::to_string(d) + "\n";
  }
  int rc = write_result(a.out, csv);
  if (rc != 0) return rc;
  return all_hit ? 0 : 2;
}

// --- render ----------------------------------------------------------------

struct RenderArgs {
  std::string kind;
  std::string name = "exx3";
  int depth = 6;
  int samples = 2;
  std::string out;
  std::string points_csv;
};

int run_render(const RenderArgs& a) {
  std::string svg;
  if (a.kind == "cantor") {
    svg = fanlab::svg_cantor(a.depth, a.samples);
    if (!a.points_csv.empty()) {
      std::string csv = "leg_id,t,x,y\n";
      for (const fanlab::PlanarLeg& leg : fanlab::embed_cantor_fan(a.depth, a.samples))
        for (const auto& [px, py] : leg.points)
          csv += std::to_string(leg.id) + "," + std::to_string(-py) + "," +
                 std::to_string(px) + "," + std::to_string(py) + "\n";
      int rc = write_result(a.points_csv, csv);
      if (rc != 0) return rc;
    }
  } else if (a.kind == "lelek") {
    svg = fanlab::svg_lelek(a.depth, fanlab::ClosedRelation(fanlab::catalog("H")));
  } else if (a.kind == "relation") {
    svg = fanlab::svg_relation(load_family(a.name),
                               a.samples > 2 ? a.samples : 256);
  } else {
    fanlab::fail(fanlab::ErrorCode::UnknownName, "unknown render kind " + a.kind);
  }
  return write_result(a.out, svg);
}

// --- verify ----------------------------------------------------------------

int run_verify(const std::string& suite) {
  std::vector<fanlab::CheckResult> results = fanlab::run_acceptance(suite, thread_cap());
  bool all = true;
  for (const fanlab::CheckResult& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail
              << "\n";
    all = all && r.passed;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fan/relation dynamics toolkit"};
  app.require_subcommand(1);

  DensityArgs da;
  CLI::App* density = app.add_subcommand("density", "witness search for density lemmas");
  density->add_option("--lemma", da.lemma, "pow23 | half-pow | propertyL | gabi")
      ->required();
  density->add_option("--x", da.x)->required();
  density->add_option("--z", da.z)->required();
  density->add_option("--eps", da.eps)->required();
  density->add_option("--bound", da.bound);
  density->add_option("--h-bound", da.h_bound);
  density->add_option("--family", da.family);

  MahavierArgs ma;
  CLI::App* mah = app.add_subcommand("mahavier", "enumerate Mahavier words");
  mah->add_option("--relation", ma.relation);
  mah->add_option("--start", ma.start)->required();
  mah->add_option("--depth", ma.depth)->required();
  mah->add_option("--budget", ma.budget);
  mah->add_option("--out", ma.out);

  OrbitArgs oa;
  CLI::App* orbit = app.add_subcommand("orbit", "skew-product orbit coverage");
  orbit->add_option("--family", oa.family);
  orbit->add_option("--targets", oa.targets_path)->required();
  orbit->add_option("--prefix", oa.prefix);
  orbit->add_option("--tail", oa.tail);
  orbit->add_option("--x0", oa.x0);
  orbit->add_option("--steps", oa.steps)->required();
  orbit->add_option("--out", oa.out);

  TransitiveArgs ta;
  CLI::App* tp = app.add_subcommand("transitive-point", "build a transitive point");
  tp->add_option("--family", ta.family);
  tp->add_option("--targets", ta.targets_path)->required();
  tp->add_option("--x0", ta.x0);
  tp->add_option("--bound", ta.bound);
  tp->add_option("--out", ta.out);

  SigmaArgs sa;
  CLI::App* sc = app.add_subcommand("sigma-chain", "build a sigma-transitivity chain");
  sc->add_option("--relation", sa.relation);
  sc->add_option("--targets", sa.targets_path)->required();
  sc->add_option("--bound", sa.bound);
  sc->add_option("--out", sa.out);

  RenderArgs ra;
  CLI::App* render = app.add_subcommand("render", "render SVG figures");
  render->add_option("--kind", ra.kind, "cantor | lelek | relation")->required();
  render->add_option("--name", ra.name);
  render->add_option("--depth", ra.depth);
  render->add_option("--samples", ra.samples);
  render->add_option("--out", ra.out);
  render->add_option("--points-csv", ra.points_csv);

  std::string suite = "all";
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", suite, "all | density | transitivity | mahavier | fans");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*density) return run_density(da);
    if (*mah) return run_mahavier(ma);
    if (*orbit) return run_orbit(oa);
    if (*tp) return run_transitive_point(ta);
    if (*sc) return run_sigma_chain(sa);
    if (*render) return run_render(ra);
    if (*verify) return run_verify(suite);
  } catch (const fanlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
