#pragma once

#include "qwnet/devices.hpp"
#include "qwnet/graph.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qwnet {

// A parsed network description whose device arguments may still reference
// named parameters ("phase:$phi1"). Structure (ports, dims) is fixed; only
// device arguments vary between instantiations.
class NetworkTemplate {
 public:
  struct NodeRecord {
    NodeId id = 0;
    std::string name;
    std::vector<EdgeId> ports;
    bool lossy = false;
    std::optional<DeviceSpec> device;
    CMatrix matrix;  // literal entries when no device is given
    int line = 0;    // position of the `node` keyword, for diagnostics
  };

  int node_count = 0;
  int edge_count = 0;
  std::vector<NodeRecord> nodes;
  std::vector<Complex> phase;            // empty means all ones
  std::vector<std::string> edge_names;   // empty means unnamed

  std::set<std::string> parameters() const;

  // Substitutes every parameter and validates the result.
  NetworkGraph instantiate(const std::map<std::string, double>& bindings = {}) const;
};

// Text format (one keyword-led record per line, '#' starts a comment):
//
//   network <n> <d>
//   node <id> [<name>]
//     ports <e_1> ... <e_k>
//     matrix <re> <im> ...          k*k pairs, row-major, may wrap lines
//     device <spec>                 instead of matrix
//     lossy                         optional; skips the unitarity check
//   phase <edge> <re> <im>          optional, default 1
//   edge <edge> <name>              optional edge label
//
// Throws ParseError (with line and column) on syntax errors and
// ValidationError on structural violations.
NetworkTemplate parse_network_template(std::string_view text);

NetworkGraph parse_network(std::string_view text);

// Canonical form; parse_network(serialize_network(g)) == g bit for bit.
std::string serialize_network(const NetworkGraph& graph);

std::string read_text_file(const std::string& path);

}  // namespace qwnet
