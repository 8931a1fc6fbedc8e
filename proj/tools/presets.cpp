#include "presets.hpp"

#include <map>

namespace qcrlab {

namespace {

std::string config(const std::string& manifold, const std::string& tasks, int samples,
                   const std::string& extra = "") {
  return "[manifold]\n" + manifold + "\n[run]\ntasks = " + tasks + "\nsamples = " + std::to_string(samples) +
         "\nseed = 20240611\n" + extra;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"sphere-levi-n2", "sphere S^11: Levi form is twice the round metric on Q",
       config("name = sphere\nn = 2", "levi, pseudoconvexity", 50)},
      {"heisenberg-levi-n2", "Heisenberg group: Levi(X_a, X_b) = 2 delta on the standard frame",
       config("name = heisenberg\nn = 2", "levi", 50)},
      {"ellipsoid-qc-fail", "generic ellipsoid: Levi closed form holds but the structure is not quaternionic contact",
       config("name = ellipsoid\nn = 2", "levi, qcontact", 50, "[expect]\nlevi = pass\nqcontact = fail\n")},
      {"ellipsoid-quaternionic-qc", "quaternionic ellipsoid: quaternionic contact, Reeb span equals the canonical plane",
       config("name = ellipsoid\nn = 2\npreset = quaternionic", "levi, qcontact", 50)},
      {"deformed-nonintegrable", "deformed Heisenberg with Lambda depending on a: integrability fails",
       config("name = deformed_heisenberg\nn = 2\npreset = non_integrable", "integrability", 50,
              "[expect]\nintegrability = fail\n")},
      {"hopf-t3-usc", "T^3 bundle over the Hopf surface: ultra-pseudoconvex, h = 2 Levi + 2 dmu^2",
       config("name = t3_hopf\nn = 1\nalpha_re = 2\nalpha_im = 0.5", "integrability, levi, pseudoconvexity", 50)},
      {"deformed-indefinite", "deformed Heisenberg with A = n+1, B = C = D = -n/3: h indefinite, no canonical triple",
       config("name = deformed_heisenberg\nn = 2\npreset = indefinite", "pseudoconvexity, canonical", 50,
              "[expect]\npseudoconvexity = fail\ncanonical = fail\n")},
      {"sphere-canonical-n2", "sphere: canonical triple kills the E(x)H component",
       config("name = sphere\nn = 2", "canonical", 50)},
      {"ellipsoid-canonical-n3", "generic ellipsoid, n = 3: canonical correction and projector cross-check",
       config("name = ellipsoid\nn = 3", "canonical", 50)},
      {"sphere-curvature-n2", "sphere: r = 2(n+2) Levi and s = 8n(n+2)",
       config("name = sphere\nn = 2", "curvature", 50)},
      {"heisenberg-curvature-n2", "Heisenberg group: flat canonical connection",
       config("name = heisenberg\nn = 2", "curvature", 50)},
      {"sphere-conformal-n2", "sphere: conformal change law of the canonical triple",
       config("name = sphere\nn = 2", "conformal", 50)},
      {"sphere-gluing-n2", "sphere: Levi form and canonical plane invariant under SO(3) gauge rotation",
       config("name = sphere\nn = 2", "gluing", 50)},
      {"sphere-integrability-n2", "sphere: integrability and the S^2 family identities",
       config("name = sphere\nn = 2", "integrability", 50)},
      {"heisenberg-qcontact-n2", "Heisenberg group: Reeb fields span the canonical plane",
       config("name = heisenberg\nn = 2", "qcontact", 50)},
  };
  return list;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

std::string explain_task(const std::string& task) {
  static const std::map<std::string, std::string> text = {
      {"integrability",
       "Checks that the structure is hyper CR: theta_a([X,Y] - [I_a X, I_a Y]) vanishes and the Q-valued defect\n"
       "of I_a is zero, on frame pairs and random combinations of Q. On the sphere it also checks the\n"
       "integrability of the structure I_v for a random unit v, independence of d theta_u(I_v X, I_v Y) from v,\n"
       "and the rotated-pair expression of the Levi form.\n"
       "residual: largest defect. default tolerance 1e-8."},
      {"levi",
       "Computes the Levi form from its three defining expressions on an orthonormal basis of Q and reports\n"
       "their spread. For the sphere, Heisenberg and deformed Heisenberg spaces it also compares against the\n"
       "known closed form (2 round metric, 2 delta, Lambda/4 delta).\n"
       "residual: max of spread and closed-form deviation. default tolerance 1e-8."},
      {"pseudoconvexity",
       "Classifies the Levi form (strong pseudoconvexity) and h = (2n+4) Levi - sum_a d theta_a(., I_a .)\n"
       "(ultra-pseudoconvexity) by their eigenvalues. Passes when both are definite.\n"
       "residual: 0 when both definite, else 1. tolerance is the eigenvalue threshold, default 1e-9."},
      {"canonical",
       "Solves for the canonical admissible triple T_a + 2 I_a V and reports V, the E(x)H coefficients before\n"
       "and after the correction, the condition number of h, and the gap between the explicit coefficient\n"
       "formulas and the abstract projector. Requires n >= 2 and definite h.\n"
       "residual: max of remaining E(x)H coefficient and projector gap. default tolerance 1e-8."},
      {"curvature",
       "Curvature of the canonical connection of the reference triple: Ricci, quaternion-hermitian part r and\n"
       "scalar s. The sphere is compared with r = 2(n+2) Levi, s = 8n(n+2); the Heisenberg group with R = 0;\n"
       "otherwise jet derivatives are compared with a finite-difference evaluation.\n"
       "residual: relative deviation. default tolerance 1e-6."},
      {"qcontact",
       "Deviation of d theta_a(X, I_a Y) from Levi(X, Y) on Q, normalized by |Levi|. When it vanishes and n >= 2,\n"
       "also solves for the Reeb fields and reports their principal angle to the canonical plane.\n"
       "residual: max of deviation and angle. default tolerance 1e-8."},
      {"gluing",
       "Applies a random constant SO(3) gauge rotation and compares the Levi form and the canonical plane and\n"
       "connection of both gauges.\n"
       "residual: max of Levi change, principal angle and connection difference. default tolerance 1e-7."},
      {"conformal",
       "Rescales theta by e^{2f} for a random smooth f and compares the canonical triple of the rescaled\n"
       "structure with e^{-2f}(T_a + 2 I_a W), h(W, .) = -(2n+1) df on Q.\n"
       "residual: largest component difference. default tolerance 1e-8."},
  };
  const auto it = text.find(task);
  return it == text.end() ? std::string() : it->second;
}

}  // namespace qcrlab
