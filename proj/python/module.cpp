// Python bindings for the main operations: rotations and their irrep
// matrices, subgroup branching and kick classification, the rigid-rotor,
// planar, and sphere codes with their error-correction checks, and the
// damped-codeword asymptotics.  Thin value-returning wrappers; heavy state
// stays on the C++ side.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "rotorcodes/irreps.hpp"
#include "rotorcodes/molecular.hpp"
#include "rotorcodes/planar.hpp"
#include "rotorcodes/rotation.hpp"
#include "rotorcodes/sphere.hpp"
#include "rotorcodes/subgroup.hpp"
#include "rotorcodes/wigner.hpp"

namespace py = pybind11;
using namespace rotorcodes;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return Vec3{a[0], a[1], a[2]}; }

SpherePoint to_point(const std::pair<double, double>& tp) {
  return SpherePoint{tp.first, tp.second};
}

std::vector<SpherePoint> to_points(
    const std::vector<std::pair<double, double>>& tps) {
  std::vector<SpherePoint> out;
  out.reserve(tps.size());
  for (const auto& tp : tps) out.push_back(to_point(tp));
  return out;
}

}  // namespace

PYBIND11_MODULE(_rotorcodes, m) {
  m.doc() =
      "Rotor codes: error-correcting codes for planar, linear, and rigid "
      "rotors built on finite subgroups of the rotation group.";

  py::class_<Rotation>(m, "Rotation")
      .def(py::init<>())
      .def_static(
          "from_axis_angle",
          [](const std::array<double, 3>& axis, double angle) {
            return Rotation::from_axis_angle(to_vec3(axis), angle);
          },
          py::arg("axis"), py::arg("angle"))
      .def_static("from_euler_zyz",
                  static_cast<Rotation (*)(double, double, double)>(
                      &Rotation::from_euler_zyz),
                  py::arg("alpha"), py::arg("beta"), py::arg("gamma"))
      .def_static("from_quaternion", &Rotation::from_quaternion, py::arg("w"),
                  py::arg("x"), py::arg("y"), py::arg("z"))
      .def("__mul__", &Rotation::operator*)
      .def("inverse", &Rotation::inverse)
      .def("angle", &Rotation::angle)
      .def("axis",
           [](const Rotation& r) {
             const Vec3 a = r.axis();
             return std::array<double, 3>{a.x, a.y, a.z};
           })
      .def("quaternion",
           [](const Rotation& r) {
             return std::array<double, 4>{r.w(), r.x(), r.y(), r.z()};
           })
      .def("__repr__", [](const Rotation& r) {
        return "Rotation(" + r.str() + ")";
      });

  m.def("wigner_d", &wigner_D, py::arg("l"), py::arg("rotation"),
        "Irrep matrix D^l of a rotation, indexed (m + l, n + l).");

  // Subgroup structure: kick classification and momentum branching.
  m.def(
      "classify_kicks",
      [](const std::string& h, const std::string& k, int lmax) {
        const KickClassification cls =
            classify_kicks(build_subgroup(h), build_subgroup(k), lmax);
        std::vector<std::string> out;
        for (const KickVerdict v : cls.verdict) out.push_back(to_string(v));
        return out;
      },
      py::arg("h"), py::arg("k"), py::arg("lmax"),
      "Per-degree verdicts (correctable / detectable-only / undetectable) "
      "for momentum kicks on the code with stabilizer group h inside k.");
  m.def(
      "branch_content",
      [](int ell, const std::string& group) {
        const IrrepTable t = irrep_table(build_subgroup(group));
        const std::vector<int> mult = branch(ell, t);
        std::map<std::string, int> out;
        for (int i = 0; i < t.num_irreps(); ++i)
          if (mult[i] != 0) out[t.irreps[i].label] = mult[i];
        return out;
      },
      py::arg("ell"), py::arg("group"),
      "Multiplicities of the subgroup irreps inside momentum level ell.");

  // Error-correction condition reports (shared by the rotor and sphere
  // codes).
  py::class_<KLViolation>(m, "KLViolation")
      .def_readonly("error_a", &KLViolation::error_a)
      .def_readonly("error_b", &KLViolation::error_b)
      .def_readonly("row", &KLViolation::row)
      .def_readonly("col", &KLViolation::col)
      .def_readonly("condition", &KLViolation::condition)
      .def_readonly("magnitude", &KLViolation::magnitude);
  py::class_<KLReport>(m, "KLReport")
      .def_readonly("passed", &KLReport::passed)
      .def_readonly("tolerance", &KLReport::tolerance)
      .def_readonly("pairs_checked", &KLReport::pairs_checked)
      .def_readonly("violations", &KLReport::violations);

  // Rigid-rotor codes.
  py::class_<MolecularCode>(m, "MolecularCode")
      .def_readonly("dim", &MolecularCode::dim)
      .def_property_readonly("codeword_count", [](const MolecularCode& c) {
        return c.codewords.size();
      });
  m.def(
      "build_molecular_code",
      [](const std::string& h, const std::string& k) {
        return build_molecular_code(build_subgroup(h), build_subgroup(k));
      },
      py::arg("h"), py::arg("k"));
  m.def(
      "mol_kl_check",
      [](const MolecularCode& code, const std::vector<Rotation>& rotations,
         int lmax, double tol) {
        return kl_check(code, rotations, kicks_up_to(lmax), tol);
      },
      py::arg("code"), py::arg("rotations"), py::arg("lmax"),
      py::arg("tol") = 1e-9,
      "Error-correction conditions over identity + rotations + all kicks "
      "with l <= lmax.");

  py::class_<MomentumBudget>(m, "MomentumBudget")
      .def_readonly("lbar_exact", &MomentumBudget::lbar_exact)
      .def_readonly("lbar_asymptotic", &MomentumBudget::lbar_asymptotic)
      .def_readonly("spread", &MomentumBudget::spread)
      .def_readonly("l_used", &MomentumBudget::l_used);
  m.def("avg_momentum", &avg_momentum, py::arg("delta"), py::arg("n"));
  m.def("momentum_support_fraction", &momentum_support_fraction,
        py::arg("delta"), py::arg("n"), py::arg("l_cap"));

  py::class_<LeakageResult>(m, "LeakageResult")
      .def_readonly("p_numeric", &LeakageResult::p_numeric)
      .def_readonly("p_asymptotic", &LeakageResult::p_asymptotic)
      .def_readonly("cell_mass_sum", &LeakageResult::cell_mass_sum);
  m.def("leakage_probability", &leakage_probability, py::arg("n"),
        py::arg("delta"), py::arg("resolution") = 36);

  py::class_<DistortionResult>(m, "DistortionResult")
      .def_readonly("exact", &DistortionResult::exact)
      .def_readonly("heuristic", &DistortionResult::heuristic)
      .def_readonly("l_used", &DistortionResult::l_used);
  m.def("distortion", &distortion, py::arg("n"), py::arg("delta"),
        py::arg("l"));

  // Planar code.
  py::class_<PlanarState>(m, "PlanarState")
      .def_readonly("M", &PlanarState::M)
      .def_property_readonly("amplitudes", [](const PlanarState& s) {
        return s.amplitudes;
      });
  m.def("planar_position_state", &planar_position_state, py::arg("M"),
        py::arg("j"));
  py::class_<PlanarCode>(m, "PlanarCode")
      .def_readonly("N", &PlanarCode::N)
      .def_readonly("d", &PlanarCode::d)
      .def_readonly("M", &PlanarCode::M)
      .def("codeword", [](const PlanarCode& c, int r) {
        return c.codewords.at(static_cast<std::size_t>(r));
      });
  m.def("make_planar_code", &make_planar_code, py::arg("N"), py::arg("d"),
        py::arg("M"));
  m.def("shift", &shift, py::arg("state"), py::arg("delta_steps"));
  m.def("kick", &kick, py::arg("state"), py::arg("delta_ell"));
  py::class_<PlanarSyndrome>(m, "PlanarSyndrome")
      .def_readonly("position_steps", &PlanarSyndrome::position_steps)
      .def_readonly("position_radians", &PlanarSyndrome::position_radians)
      .def_readonly("momentum_residue", &PlanarSyndrome::momentum_residue)
      .def_readonly("momentum_centered", &PlanarSyndrome::momentum_centered)
      .def_readonly("position_ambiguous", &PlanarSyndrome::position_ambiguous)
      .def_readonly("momentum_ambiguous",
                    &PlanarSyndrome::momentum_ambiguous);
  m.def("syndrome", &syndrome, py::arg("state"), py::arg("code"));
  m.def("recover", &recover, py::arg("state"), py::arg("syndrome"),
        py::arg("code"));
  m.def("planar_inner", &planar_inner, py::arg("a"), py::arg("b"));

  // Sphere code.
  py::class_<SphereCode>(m, "SphereCode")
      .def_readonly("family", &SphereCode::family)
      .def_property_readonly("seed",
                             [](const SphereCode& c) {
                               return std::make_pair(c.seed.theta,
                                                     c.seed.phi);
                             })
      .def_property_readonly("constituents", [](const SphereCode& c) {
        std::vector<std::vector<std::pair<double, double>>> out;
        for (const auto& side : c.constituents) {
          std::vector<std::pair<double, double>> pts;
          for (const SpherePoint& p : side) pts.emplace_back(p.theta, p.phi);
          out.push_back(std::move(pts));
        }
        return out;
      });
  m.def("build_sphere_code", &build_sphere_code, py::arg("family"));
  m.def(
      "sphere_kl_check",
      [](const SphereCode& code, const std::vector<Rotation>& rotations,
         int lmax, bool include_combined, double tol) {
        return kl_check(code, rotations, sphere_kicks_up_to(lmax),
                        include_combined, tol);
      },
      py::arg("code"), py::arg("rotations"), py::arg("lmax"),
      py::arg("include_combined") = false, py::arg("tol") = 1e-9);
  m.def(
      "check_function_value",
      [](const SphereCode& code, const std::pair<double, double>& p) {
        return check_function_value(code, to_point(p));
      },
      py::arg("code"), py::arg("point"),
      "Z-type check function at a point (theta, phi).");

  py::class_<DesignReport>(m, "DesignReport")
      .def_readonly("L", &DesignReport::L)
      .def_readonly("is_design", &DesignReport::is_design)
      .def_readonly("first_violation_l", &DesignReport::first_violation_l)
      .def_readonly("residual_by_l", &DesignReport::residual_by_l);
  m.def(
      "is_spherical_design",
      [](const std::vector<std::pair<double, double>>& points, int L,
         double tol) { return is_spherical_design(to_points(points), L, tol); },
      py::arg("points"), py::arg("L"), py::arg("tol") = 1e-9);
}
