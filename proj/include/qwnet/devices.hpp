#pragma once

#include "qwnet/graph.hpp"
#include "qwnet/types.hpp"

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qwnet {

/// n-port Grover coin (2/n)J - I. Symmetric, real and involutive.
CMatrix grover_coin(int nports);

/// 4x4 50:50 beam splitter coupling ports {1,2} to {3,4}.
CMatrix beamsplitter_5050();

/// Transmissive phase element [[0, e^{i phi/2}], [e^{i phi/2}, 0]]. Half the
/// phase per pass, so a round trip through it accumulates e^{i phi}.
CMatrix phase_node(double phi);

/// 1x1 ideal mirror, (-1).
CMatrix mirror();

/// 2x2 identity-transmission node used to split edges.
CMatrix pass_through();

/// Closed-form scattering coefficients of the Grover-Michelson interferometer
/// for arm phases (phi1, phi2), input on port 1.
struct AnalyticGMCoefficients {
  Complex B;
  Complex C;
  Complex t;
  Complex r;
};

// Throws SingularSystemError at phi1 = phi2 = 0 (mod 2 pi), where the trapped
// arm mode sits exactly at eigenvalue 1.
AnalyticGMCoefficients gm_analytic(double phi1, double phi2);

/// Five-node Grover-Michelson graph: g (grover:4 on edges 1,2,3,4),
/// p1 (phase phi1 on 3,5), p2 (phase phi2 on 4,6), m1 (mirror on 5),
/// m2 (mirror on 6). Edges 1 and 2 are the open ports; phases are all 1.
NetworkGraph build_grover_michelson(double phi1, double phi2);

// A device constructor reference as written in network files, e.g.
// "grover:4", "bs5050", "mirror", "pass", "identity:3", "phase:0.5" or, in
// sweep templates, "phase:$phi1".
class DeviceSpec {
 public:
  using Arg = std::variant<double, std::string>;  // literal or parameter name

  static DeviceSpec parse(std::string_view text);

  const std::string& kind() const { return kind_; }
  const std::vector<Arg>& args() const { return args_; }
  std::vector<std::string> parameters() const;
  bool is_parametric() const { return !parameters().empty(); }

  // Substitutes parameters and builds the matrix. Returns the canonical
  // literal spec through `canonical` when non-null.
  CMatrix build(const std::map<std::string, double>& bindings = {},
                std::string* canonical = nullptr) const;

  std::string to_string() const;

 private:
  std::string kind_;
  std::vector<Arg> args_;
};

/// Builds the matrix for a literal device spec.
CMatrix make_device(std::string_view spec);

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace qwnet
