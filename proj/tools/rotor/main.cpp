// rotor: command-line front end for the rotorcodes library.
//
// Command tree
//   code   branch | classify      -- branching tables and kick verdicts
//   mol    kl | checks | sweep    -- rigid-rotor codes H < K in SO(3)
//   planar demo | code            -- discretized planar-rotor round trips
//   sphere design | kl | checks   -- linear-rotor codes on S^2
//   tables                        -- character tables of the finite subgroups
//
// Global flags: --out (artifact path, stdout when absent), --format
// (json | csv where a command supports both), --seed (randomized property
// checks), --threads (sweep workers), --check (exit 1 when the command's
// pass condition fails).  Exit codes: 0 ok, 1 check failure, 2 usage,
// 3 numeric non-convergence.  Artifacts are written atomically and are
// byte-identical for a fixed (command line, seed).
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <functional>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rotorcodes/irreps.hpp"
#include "rotorcodes/molecular.hpp"
#include "rotorcodes/planar.hpp"
#include "rotorcodes/rotation.hpp"
#include "rotorcodes/sphere.hpp"
#include "rotorcodes/subgroup.hpp"
#include "rotorcodes/wigner.hpp"

using nlohmann::ordered_json;
using namespace rotorcodes;

namespace {

constexpr int kSchemaVersion = 1;
enum ExitCode { kOk = 0, kCheckFail = 1, kUsage = 2, kNumeric = 3 };

struct GlobalOpts {
  std::string out;
  std::string format;  // "", "json", or "csv"
  std::uint64_t seed = 0;
  int threads = 1;
  bool check = false;
};

// Resolve the format for a command, validating against what it supports.
std::string pick_format(const GlobalOpts& g, const std::string& preferred,
                        bool csv_ok) {
  if (g.format.empty()) return preferred;
  if (g.format == "csv" && !csv_ok)
    throw CLI::ValidationError("--format", "this command emits json only");
  return g.format;
}

// Atomic artifact write: stage next to the target, then rename over it.
void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(g.out);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << text;
  }
  std::filesystem::rename(tmp, target);
}

void emit_json(const GlobalOpts& g, const ordered_json& doc) {
  // Reaching the json emitter with csv requested means the command has no
  // csv rendering; reject rather than mislabel the artifact.
  if (g.format == "csv")
    throw CLI::ValidationError("--format", "this command emits json only");
  emit(g, doc.dump(2) + "\n");
}

// Shortest representation that round-trips, matching the JSON emitter.
std::string fmt_double(double x) { return ordered_json(x).dump(); }

// Static index partition: deterministic results regardless of worker count.
template <typename Fn>
void parallel_for(int n, int threads, Fn fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([=]() {
      for (int i = t; i < n; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<double> parse_range(const std::string& spec) {
  // "a:b:step" inclusive of both ends up to rounding; "a" alone is a point.
  std::vector<double> out;
  double a = 0, b = 0, s = 0;
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) {
    out.push_back(std::stod(spec));
    return out;
  }
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("range must be start:stop:step");
  a = std::stod(spec.substr(0, c1));
  b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  s = std::stod(spec.substr(c2 + 1));
  if (s <= 0 || b < a)
    throw std::invalid_argument("range must satisfy start <= stop, step > 0");
  for (int i = 0;; ++i) {
    const double x = a + i * s;
    if (x > b + 1e-12) break;
    out.push_back(x);
  }
  return out;
}

ordered_json header(const std::string& command, const GlobalOpts& g) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["seed"] = g.seed;
  return doc;
}

ordered_json kl_to_json(const KLReport& rep) {
  ordered_json j;
  j["passed"] = rep.passed;
  j["tolerance"] = rep.tolerance;
  j["pairs_checked"] = rep.pairs_checked;
  ordered_json vs = ordered_json::array();
  for (const auto& v : rep.violations) {
    ordered_json vj;
    vj["error_a"] = v.error_a;
    vj["error_b"] = v.error_b;
    vj["row"] = v.row;
    vj["col"] = v.col;
    vj["condition"] = v.condition;
    vj["magnitude"] = v.magnitude;
    vs.push_back(vj);
  }
  j["violations"] = vs;
  return j;
}

// Haar sample conditioned to lie strictly inside the Voronoi cell of K, so
// randomized KL rotations stay within the correctable set.
Rotation haar_in_cell(const FiniteSubgroup& k, std::mt19937_64& rng) {
  for (;;) {
    const Rotation r = haar_sample(rng);
    const OrbitSnap snap = snap_to_orbit(r, k, 1e-6);
    if (!snap.boundary_tie && Rotation::approx_equal(snap.coset_part, r))
      return r;
  }
}

// ---------------------------------------------------------------------------
// code branch / code classify

int run_code_branch(const GlobalOpts& g, const std::string& k_name,
                    const std::string& h_name, int lmax) {
  const FiniteSubgroup k = build_subgroup(k_name);
  const FiniteSubgroup h = build_subgroup(h_name);
  ordered_json doc = header("code branch", g);
  doc["K"] = k.name;
  doc["H"] = h.name;
  doc["lmax"] = lmax;
  ordered_json levels = ordered_json::array();
  for (int l = 0; l <= lmax; ++l) {
    const BranchReport rep = branch_report(l, k, h);
    ordered_json lj;
    lj["ell"] = l;
    ordered_json kc, hc;
    for (std::size_t i = 0; i < rep.k_labels.size(); ++i)
      if (rep.mult_k[i] > 0) kc[rep.k_labels[i]] = rep.mult_k[i];
    for (std::size_t i = 0; i < rep.h_labels.size(); ++i)
      if (rep.mult_h[i] > 0) hc[rep.h_labels[i]] = rep.mult_h[i];
    lj["k_content"] = kc;
    lj["h_content"] = hc;
    ordered_json restr;
    for (std::size_t i = 0; i < rep.k_labels.size(); ++i) {
      if (rep.mult_k[i] == 0) continue;
      ordered_json row;
      for (std::size_t j = 0; j < rep.h_labels.size(); ++j)
        if (rep.restriction(int(i), int(j)) > 0)
          row[rep.h_labels[j]] = rep.restriction(int(i), int(j));
      restr[rep.k_labels[i]] = row;
    }
    lj["restriction"] = restr;
    levels.push_back(lj);
  }
  doc["levels"] = levels;
  emit_json(g, doc);
  return kOk;
}

int run_code_classify(const GlobalOpts& g, const std::string& k_name,
                      const std::string& h_name, int lmax) {
  const FiniteSubgroup k = build_subgroup(k_name);
  const FiniteSubgroup h = build_subgroup(h_name);
  const KickClassification cls = classify_kicks(h, k, lmax);
  const std::string format = pick_format(g, "json", true);
  if (format == "csv") {
    std::ostringstream os;
    os << "ell,verdict\n";
    for (int l = 0; l <= lmax; ++l)
      os << l << "," << to_string(cls.verdict[l]) << "\n";
    emit(g, os.str());
    return kOk;
  }
  ordered_json doc = header("code classify", g);
  doc["K"] = k.name;
  doc["H"] = h.name;
  doc["lmax"] = lmax;
  ordered_json levels = ordered_json::array();
  for (int l = 0; l <= lmax; ++l) {
    ordered_json lj;
    lj["ell"] = l;
    lj["verdict"] = to_string(cls.verdict[l]);
    lj["detail"] = cls.detail[l];
    levels.push_back(lj);
  }
  doc["levels"] = levels;
  emit_json(g, doc);
  return kOk;
}

// ---------------------------------------------------------------------------
// mol kl / mol checks / mol sweep

int run_mol_kl(const GlobalOpts& g, const std::string& h_name,
               const std::string& k_name, int lmax, int n_rotations) {
  const MolecularCode code =
      build_molecular_code(build_subgroup(h_name), build_subgroup(k_name));
  std::mt19937_64 rng(g.seed);
  std::vector<Rotation> rotations;
  for (int i = 0; i < n_rotations; ++i)
    rotations.push_back(haar_in_cell(code.k, rng));
  const KLReport rep = kl_check(code, rotations, kicks_up_to(lmax));

  ordered_json doc = header("mol kl", g);
  doc["H"] = code.h.name;
  doc["K"] = code.k.name;
  doc["code_dimension"] = code.dim;
  doc["lmax"] = lmax;
  doc["rotations"] = n_rotations;
  doc["report"] = kl_to_json(rep);
  emit_json(g, doc);
  return (g.check && !rep.passed) ? kCheckFail : kOk;
}

int run_mol_checks(const GlobalOpts& g, const std::string& h_name,
                   const std::string& k_name) {
  const MolecularCode code =
      build_molecular_code(build_subgroup(h_name), build_subgroup(k_name));
  const CheckOperatorCertificate cert = check_operators(code);
  ordered_json doc = header("mol checks", g);
  doc["H"] = code.h.name;
  doc["K"] = code.k.name;
  doc["n"] = cert.n;
  doc["codeword_sx_residual"] = cert.codeword_sx_residual;
  doc["codeword_sz_residual"] = cert.codeword_sz_residual;
  doc["zak_eigenvalue_residual"] = cert.zak_eigenvalue_residual;
  doc["anticommutator_residual"] = cert.anticommutator_residual;
  doc["commutator_residual"] = cert.commutator_residual;
  const double worst = std::max(
      {cert.codeword_sx_residual, cert.codeword_sz_residual,
       cert.zak_eigenvalue_residual, cert.anticommutator_residual,
       cert.commutator_residual});
  doc["passed"] = worst < 1e-8;
  emit_json(g, doc);
  return (g.check && worst >= 1e-8) ? kCheckFail : kOk;
}

int run_mol_sweep_pleak(const GlobalOpts& g, int n,
                        const std::string& range_spec) {
  const std::vector<double> deltas = parse_range(range_spec);
  struct Row {
    double delta, lbar_exact, lbar_asym, pleak_num, pleak_asym, mass;
  };
  std::vector<Row> rows(deltas.size());
  parallel_for(int(deltas.size()), g.threads, [&](int i) {
    const double d = deltas[i];
    const MomentumBudget mb = avg_momentum(d, n);
    const LeakageResult lr = leakage_probability(n, d);
    rows[i] = {d, mb.lbar_exact, mb.lbar_asymptotic, lr.p_numeric,
               lr.p_asymptotic, lr.cell_mass_sum};
  });
  for (const Row& r : rows) {
    if (!std::isfinite(r.pleak_num) || std::abs(r.mass - 1.0) > 1e-6) {
      std::cerr << "rotor: leakage quadrature did not converge at delta = "
                << r.delta << " (cell mass " << r.mass << ")\n";
      return kNumeric;
    }
  }

  const std::string format = pick_format(g, "csv", true);
  if (format == "csv") {
    std::ostringstream os;
    os << "delta,lbar_exact,lbar_asym,pleak_num,pleak_asym\n";
    for (const Row& r : rows)
      os << fmt_double(r.delta) << "," << fmt_double(r.lbar_exact) << ","
         << fmt_double(r.lbar_asym) << "," << fmt_double(r.pleak_num) << ","
         << fmt_double(r.pleak_asym) << "\n";
    emit(g, os.str());
    return kOk;
  }
  ordered_json doc = header("mol sweep pleak", g);
  doc["N"] = n;
  ordered_json arr = ordered_json::array();
  for (const Row& r : rows) {
    ordered_json rj;
    rj["delta"] = r.delta;
    rj["lbar_exact"] = r.lbar_exact;
    rj["lbar_asym"] = r.lbar_asym;
    rj["pleak_num"] = r.pleak_num;
    rj["pleak_asym"] = r.pleak_asym;
    arr.push_back(rj);
  }
  doc["rows"] = arr;
  emit_json(g, doc);
  return kOk;
}

int run_mol_sweep_distortion(const GlobalOpts& g, int n, int l,
                             const std::string& range_spec) {
  const std::vector<double> deltas = parse_range(range_spec);
  struct Row {
    double delta, exact, heuristic;
  };
  std::vector<Row> rows(deltas.size());
  parallel_for(int(deltas.size()), g.threads, [&](int i) {
    const DistortionResult dr = distortion(n, deltas[i], l);
    rows[i] = {deltas[i], dr.exact, dr.heuristic};
  });
  for (const Row& r : rows)
    if (!std::isfinite(r.exact)) return kNumeric;

  const std::string format = pick_format(g, "csv", true);
  if (format == "csv") {
    std::ostringstream os;
    os << "delta,exact,heuristic\n";
    for (const Row& r : rows)
      os << fmt_double(r.delta) << "," << fmt_double(r.exact) << ","
         << fmt_double(r.heuristic) << "\n";
    emit(g, os.str());
    return kOk;
  }
  ordered_json doc = header("mol sweep distortion", g);
  doc["N"] = n;
  doc["l"] = l;
  ordered_json arr = ordered_json::array();
  for (const Row& r : rows) {
    ordered_json rj;
    rj["delta"] = r.delta;
    rj["exact"] = r.exact;
    rj["heuristic"] = r.heuristic;
    arr.push_back(rj);
  }
  doc["rows"] = arr;
  emit_json(g, doc);
  return kOk;
}

// ---------------------------------------------------------------------------
// planar demo / planar code

struct PlanarError {
  std::string type;  // "shift" or "kick"
  double radians_requested = 0.0;
  int steps = 0;  // grid steps (shift) or kick quanta
};

std::vector<PlanarError> parse_planar_errors(const std::string& spec, int M) {
  std::vector<PlanarError> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("error item must be type:value");
    const std::string type = item.substr(0, colon);
    const std::string value = item.substr(colon + 1);
    PlanarError e;
    e.type = type;
    if (type == "shift") {
      e.radians_requested = std::stod(value);
      e.steps = int(std::lround(e.radians_requested * M / (2.0 * kPi)));
    } else if (type == "kick") {
      e.steps = std::stoi(value);
    } else {
      throw std::invalid_argument("unknown error type: " + type);
    }
    out.push_back(e);
  }
  return out;
}

int run_planar_demo(const GlobalOpts& g, int n, int d, int q,
                    const std::string& error_spec) {
  const int M = q * d * n;
  const PlanarCode code = make_planar_code(n, d, M);
  const PlanarState& logical = code.codewords[0];
  const std::vector<PlanarError> errors = parse_planar_errors(error_spec, M);

  PlanarState corrupted = logical;
  ordered_json applied = ordered_json::array();
  for (const PlanarError& e : errors) {
    ordered_json ej;
    ej["type"] = e.type;
    if (e.type == "shift") {
      corrupted = shift(corrupted, e.steps);
      ej["radians_requested"] = e.radians_requested;
      ej["steps"] = e.steps;
      ej["radians_snapped"] = 2.0 * kPi * e.steps / M;
    } else {
      corrupted = kick(corrupted, e.steps);
      ej["quanta"] = e.steps;
    }
    applied.push_back(ej);
  }

  const PlanarSyndrome syn = syndrome(corrupted, code);
  const PlanarState recovered = recover(corrupted, syn, code);
  const double fidelity = std::norm(planar_inner(logical, recovered));

  ordered_json doc = header("planar demo", g);
  ordered_json cj;
  cj["N"] = code.N;
  cj["d"] = code.d;
  cj["q"] = q;
  cj["M"] = code.M;
  cj["stabilizer_kick"] = code.stabilizer_kick;
  cj["stabilizer_shift_steps"] = code.stabilizer_shift_steps;
  cj["logical_kick"] = code.logical_kick;
  cj["logical_shift_steps"] = code.logical_shift_steps;
  doc["code"] = cj;
  doc["errors"] = applied;
  ordered_json sj;
  sj["position_steps"] = syn.position_steps;
  sj["position_radians"] = syn.position_radians;
  sj["momentum_residue"] = syn.momentum_residue;
  sj["momentum_centered"] = syn.momentum_centered;
  sj["position_ambiguous"] = syn.position_ambiguous;
  sj["momentum_ambiguous"] = syn.momentum_ambiguous;
  doc["syndrome"] = sj;
  doc["fidelity"] = fidelity;
  emit_json(g, doc);
  return (g.check && fidelity < 1.0 - 1e-12) ? kCheckFail : kOk;
}

int run_planar_code(const GlobalOpts& g, int n, int d, int q) {
  const int M = q * d * n;
  const PlanarCode code = make_planar_code(n, d, M);
  ordered_json doc = header("planar code", g);
  doc["N"] = code.N;
  doc["d"] = code.d;
  doc["q"] = q;
  doc["M"] = code.M;
  doc["stabilizer_kick"] = code.stabilizer_kick;
  doc["stabilizer_shift_steps"] = code.stabilizer_shift_steps;
  doc["logical_kick"] = code.logical_kick;
  doc["logical_shift_steps"] = code.logical_shift_steps;
  emit_json(g, doc);
  return kOk;
}

// ---------------------------------------------------------------------------
// sphere design / sphere kl / sphere checks

std::vector<SpherePoint> named_point_set(const std::string& name) {
  if (name == "cube") {
    const SphereCode code = build_sphere_code("T");
    std::vector<SpherePoint> pts = code.constituents[0];
    pts.insert(pts.end(), code.constituents[1].begin(),
               code.constituents[1].end());
    return pts;
  }
  if (name == "tetrahedron") return build_sphere_code("T").constituents[0];
  if ((name[0] == 'z' || name[0] == 'Z') && name.size() > 1) {
    const int n = std::stoi(name.substr(1));
    if (n < 1) throw std::invalid_argument("cyclic point set needs N >= 1");
    std::vector<SpherePoint> pts;
    for (int h = 0; h < n; ++h)
      pts.push_back(SpherePoint{kPi / 2, 2.0 * kPi * h / n}.canonical());
    return pts;
  }
  throw std::invalid_argument("unknown point set: " + name +
                              " (expected cube, tetrahedron, or zN)");
}

int run_sphere_design(const GlobalOpts& g, const std::string& points_name,
                      int L) {
  const std::vector<SpherePoint> pts = named_point_set(points_name);
  const DesignReport rep = is_spherical_design(pts, L);
  ordered_json doc = header("sphere design", g);
  doc["points"] = points_name;
  doc["count"] = pts.size();
  doc["L"] = rep.L;
  doc["is_design"] = rep.is_design;
  doc["first_violation_l"] = rep.first_violation_l;
  doc["residual_by_l"] = rep.residual_by_l;
  doc["tolerance"] = rep.tolerance;
  emit_json(g, doc);
  return (g.check && !rep.is_design) ? kCheckFail : kOk;
}

int run_sphere_kl(const GlobalOpts& g, const std::string& family, int lmax,
                  const std::string& errors, double omega) {
  const SphereCode code = build_sphere_code(family);
  std::vector<Rotation> rotations;
  bool combined = false;
  if (errors == "combined") {
    // Rotation about the seed constituent's axis: the probe that exposes the
    // odd-degree obstruction on kick products.
    rotations.push_back(
        Rotation::from_axis_angle(code.seed.to_vec(), omega));
    combined = true;
  } else if (errors != "kicks") {
    throw std::invalid_argument("--errors must be kicks or combined");
  }
  const KLReport rep =
      kl_check(code, rotations, sphere_kicks_up_to(lmax), combined);
  ordered_json doc = header("sphere kl", g);
  doc["family"] = code.family;
  doc["lmax"] = lmax;
  doc["errors"] = errors;
  if (combined) doc["omega"] = omega;
  doc["report"] = kl_to_json(rep);
  emit_json(g, doc);
  return (g.check && !rep.passed) ? kCheckFail : kOk;
}

int run_sphere_checks(const GlobalOpts& g, const std::string& family) {
  const SphereCode code = build_sphere_code(family);
  const SphereCheckCertificate cert = check_operators(code);
  ordered_json doc = header("sphere checks", g);
  doc["family"] = cert.family;
  if (cert.n > 0) doc["n"] = cert.n;
  doc["sz_constituent_deviation"] = cert.sz_constituent_deviation;
  doc["sx_codeword_residual"] = cert.sx_codeword_residual;
  double worst =
      std::max(cert.sz_constituent_deviation, cert.sx_codeword_residual);
  if (cert.n > 0) {
    doc["x_basis_sx_residual"] = cert.x_basis_sx_residual;
    doc["logical_x_residual"] = cert.logical_x_residual;
    doc["logical_z_residual"] = cert.logical_z_residual;
    doc["identity_kick_residual"] = cert.identity_kick_residual;
    worst = std::max({worst, cert.x_basis_sx_residual,
                      cert.logical_x_residual, cert.logical_z_residual,
                      cert.identity_kick_residual});
  } else {
    doc["logical_z_constituent_deviation"] =
        cert.logical_z_constituent_deviation;
    doc["sx2_codeword_residual"] = cert.sx2_codeword_residual;
    worst = std::max({worst, cert.logical_z_constituent_deviation,
                      cert.sx2_codeword_residual});
  }
  doc["passed"] = worst < 1e-8;
  emit_json(g, doc);
  return (g.check && worst >= 1e-8) ? kCheckFail : kOk;
}

// ---------------------------------------------------------------------------
// tables

int run_tables(const GlobalOpts& g, const std::string& group_name) {
  const FiniteSubgroup grp = build_subgroup(group_name);
  const IrrepTable table = irrep_table(grp);
  ordered_json doc = header("tables", g);
  doc["group"] = grp.name;
  doc["order"] = grp.order();
  ordered_json class_sizes = ordered_json::array();
  for (const auto& cls : grp.classes) class_sizes.push_back(cls.size());
  doc["class_sizes"] = class_sizes;
  ordered_json irreps = ordered_json::array();
  for (int i = 0; i < table.num_irreps(); ++i) {
    ordered_json ij;
    ij["label"] = table.irreps[i].label;
    ij["dim"] = table.irreps[i].dim;
    ordered_json chars = ordered_json::array();
    for (int c = 0; c < int(grp.classes.size()); ++c) {
      const Complex ch = table.characters(i, c);
      chars.push_back(ordered_json::array({ch.real(), ch.imag()}));
    }
    ij["characters"] = chars;
    irreps.push_back(ij);
  }
  doc["irreps"] = irreps;
  emit_json(g, doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GKP-type quantum codes on rotational state spaces"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out, "artifact path (stdout when absent)");
  app.add_option("--format", g.format, "json or csv where supported")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "seed for randomized property checks");
  app.add_option("--threads", g.threads, "worker cap for sweeps")
      ->check(CLI::PositiveNumber);
  app.add_flag("--check", g.check, "exit 1 when the pass condition fails");

  // code ---------------------------------------------------------------
  CLI::App* code = app.add_subcommand("code", "branching and kick verdicts");
  code->require_subcommand(1);
  std::string code_k = "O", code_h = "T";
  int code_lmax = 6;
  CLI::App* code_branch =
      code->add_subcommand("branch", "irrep branching per angular momentum");
  code_branch->add_option("--K", code_k, "symmetry group")->required();
  code_branch->add_option("--H", code_h, "molecular subgroup")->required();
  code_branch->add_option("--lmax", code_lmax, "largest angular momentum");
  CLI::App* code_classify =
      code->add_subcommand("classify", "kick verdicts per angular momentum");
  code_classify->add_option("--K", code_k, "symmetry group")->required();
  code_classify->add_option("--H", code_h, "molecular subgroup")->required();
  code_classify->add_option("--lmax", code_lmax, "largest angular momentum");

  // mol ----------------------------------------------------------------
  CLI::App* mol = app.add_subcommand("mol", "rigid-rotor codes H < K");
  mol->require_subcommand(1);
  std::string mol_h = "Z3", mol_k = "Z6";
  int mol_lmax = 1, mol_rotations = 2;
  CLI::App* mol_kl = mol->add_subcommand(
      "kl", "error-correction conditions for rotations and kicks");
  mol_kl->add_option("--H", mol_h, "molecular subgroup")->required();
  mol_kl->add_option("--K", mol_k, "symmetry group")->required();
  mol_kl->add_option("--lmax", mol_lmax, "kick cutoff");
  mol_kl->add_option("--rotations", mol_rotations,
                     "random in-cell rotations to include");
  CLI::App* mol_checks =
      mol->add_subcommand("checks", "check-operator certificate");
  mol_checks->add_option("--H", mol_h, "molecular subgroup")->required();
  mol_checks->add_option("--K", mol_k, "symmetry group")->required();
  CLI::App* mol_sweep = mol->add_subcommand("sweep", "damping sweeps");
  mol_sweep->require_subcommand(1);
  int sweep_n = 3, sweep_l = 1;
  std::string sweep_range = "0.2:0.4:0.02";
  CLI::App* sweep_pleak = mol_sweep->add_subcommand(
      "pleak", "momentum budget and leakage vs damping");
  sweep_pleak->add_option("--N", sweep_n, "cyclic order")->required();
  sweep_pleak->add_option("--delta", sweep_range, "start:stop:step");
  CLI::App* sweep_dist = mol_sweep->add_subcommand(
      "distortion", "codeword-pair matrix element vs damping");
  sweep_dist->add_option("--N", sweep_n, "cyclic order")->required();
  sweep_dist->add_option("--l", sweep_l, "kick degree");
  sweep_dist->add_option("--delta", sweep_range, "start:stop:step");

  // planar -------------------------------------------------------------
  CLI::App* planar = app.add_subcommand("planar", "discretized planar rotor");
  planar->require_subcommand(1);
  int pl_n = 3, pl_d = 2, pl_q = 8;
  std::string pl_error = "shift:0.2";
  CLI::App* pl_demo =
      planar->add_subcommand("demo", "corrupt, read syndrome, recover");
  pl_demo->add_option("--N", pl_n, "stabilizer order")->required();
  pl_demo->add_option("--d", pl_d, "logical dimension")->required();
  pl_demo->add_option("--q", pl_q, "grid points per stabilizer step");
  pl_demo->add_option("--error", pl_error,
                      "comma list of shift:radians / kick:quanta");
  CLI::App* pl_code = planar->add_subcommand("code", "code parameters");
  pl_code->add_option("--N", pl_n, "stabilizer order")->required();
  pl_code->add_option("--d", pl_d, "logical dimension")->required();
  pl_code->add_option("--q", pl_q, "grid points per stabilizer step");

  // sphere -------------------------------------------------------------
  CLI::App* sphere = app.add_subcommand("sphere", "linear-rotor codes on S^2");
  sphere->require_subcommand(1);
  std::string sp_points = "cube", sp_family = "Z3", sp_errors = "kicks";
  int sp_L = 3, sp_lmax = 1;
  double sp_omega = 0.4;
  CLI::App* sp_design =
      sphere->add_subcommand("design", "spherical design test");
  sp_design->add_option("--points", sp_points, "cube | tetrahedron | zN");
  sp_design->add_option("--L", sp_L, "design strength to test")->required();
  CLI::App* sp_kl = sphere->add_subcommand(
      "kl", "error-correction conditions for kicks and rotations");
  sp_kl->add_option("--family", sp_family, "ZN (odd) or T");
  sp_kl->add_option("--lmax", sp_lmax, "kick cutoff");
  sp_kl->add_option("--errors", sp_errors, "kicks | combined");
  sp_kl->add_option("--omega", sp_omega,
                    "constituent-axis rotation angle for combined errors");
  CLI::App* sp_checks =
      sphere->add_subcommand("checks", "check-operator certificate");
  sp_checks->add_option("--family", sp_family, "ZN (odd) or T");

  // tables -------------------------------------------------------------
  CLI::App* tables =
      app.add_subcommand("tables", "character table of a finite subgroup");
  std::string tb_group = "T";
  tables->add_option("--group", tb_group, "Z*, D*, T, O, or I");

  // Let global flags appear anywhere on the line, including after the
  // subcommand's own options.
  const std::function<void(CLI::App*)> allow_globals = [&](CLI::App* a) {
    a->fallthrough();
    for (CLI::App* sub : a->get_subcommands({})) allow_globals(sub);
  };
  allow_globals(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (code_branch->parsed())
      return run_code_branch(g, code_k, code_h, code_lmax);
    if (code_classify->parsed())
      return run_code_classify(g, code_k, code_h, code_lmax);
    if (mol_kl->parsed())
      return run_mol_kl(g, mol_h, mol_k, mol_lmax, mol_rotations);
    if (mol_checks->parsed()) return run_mol_checks(g, mol_h, mol_k);
    if (sweep_pleak->parsed())
      return run_mol_sweep_pleak(g, sweep_n, sweep_range);
    if (sweep_dist->parsed())
      return run_mol_sweep_distortion(g, sweep_n, sweep_l, sweep_range);
    if (pl_demo->parsed()) return run_planar_demo(g, pl_n, pl_d, pl_q, pl_error);
    if (pl_code->parsed()) return run_planar_code(g, pl_n, pl_d, pl_q);
    if (sp_design->parsed()) return run_sphere_design(g, sp_points, sp_L);
    if (sp_kl->parsed())
      return run_sphere_kl(g, sp_family, sp_lmax, sp_errors, sp_omega);
    if (sp_checks->parsed()) return run_sphere_checks(g, sp_family);
    if (tables->parsed()) return run_tables(g, tb_group);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "rotor: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rotor: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "rotor: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
