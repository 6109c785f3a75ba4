#pragma once

#include "qwnet/types.hpp"

#include <string>
#include <vector>

namespace qwnet {

// One scattering node. ports[k] is the global edge attached to local port k
// (0-based here, 1-based in files). A global edge listed twice in the same
// node is a self-loop joining two of its ports.
struct LocalScatterer {
  NodeId id = 0;
  std::string name;
  CMatrix matrix;
  std::vector<EdgeId> ports;
  bool lossy = false;
  // Constructor spec ("grover:4", "phase:1.25", ...) when the matrix came from
  // a named device. Empty for literal matrices.
  std::string device;

  int dim() const { return static_cast<int>(ports.size()); }

  // Exact (bitwise-value) comparison, including the matrix.
  bool operator==(const LocalScatterer& other) const;
};

// Immutable, validated network. Construction checks every structural
// invariant and throws ValidationError on the first violation.
class NetworkGraph {
 public:
  NetworkGraph(int edge_count, std::vector<LocalScatterer> nodes,
               std::vector<Complex> phase = {},
               std::vector<std::string> edge_names = {});

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return edge_count_; }

  const std::vector<LocalScatterer>& nodes() const { return nodes_; }
  const LocalScatterer& node(NodeId id) const;

  // Diagonal of the per-edge propagation phase matrix, indexed by edge - 1.
  const std::vector<Complex>& phase() const { return phase_; }
  Complex phase(EdgeId e) const { return phase_.at(e - 1); }

  // Optional edge labels, indexed by edge - 1; empty strings when unnamed.
  const std::vector<std::string>& edge_names() const { return edge_names_; }

  bool operator==(const NetworkGraph&) const = default;

 private:
  int edge_count_;
  std::vector<LocalScatterer> nodes_;
  std::vector<Complex> phase_;
  std::vector<std::string> edge_names_;
};

struct OpenPort {
  NodeId node;
  EdgeId edge;
  bool operator==(const OpenPort&) const = default;
};

// Inverse of the local-to-global maps.
struct EdgeIncidence {
  // nodes_of_edge[e - 1] lists the nodes touching edge e in ascending order;
  // a self-loop appears as {a, a}.
  std::vector<std::vector<NodeId>> nodes_of_edge;
  // Edges touched by exactly one node, ascending by edge id.
  std::vector<OpenPort> open_ports;

  bool is_open(EdgeId e) const { return nodes_of_edge.at(e - 1).size() == 1; }
  int internal_edge_count() const;
  std::vector<EdgeId> open_edges() const;
  std::vector<EdgeId> internal_edges() const;
  // Node owning an open edge; throws ValidationError if e is internal.
  NodeId owner_of_open_edge(EdgeId e) const;
  // Neighbors of each node through internal edges, ascending, deduplicated;
  // a node with a self-loop lists itself. Indexed by node - 1.
  std::vector<std::vector<NodeId>> neighbors(int node_count) const;
};

EdgeIncidence build_incidence(const NetworkGraph& graph);

enum class HazardKind { ParallelEdges, SelfLoop, CoActivation };

struct Hazard {
  HazardKind kind;
  NodeId a;  // a <= b
  NodeId b;
  bool operator==(const Hazard&) const = default;
};

std::string to_string(HazardKind kind);
std::string describe(const Hazard& hazard);

// Lists every pair of nodes joined by two or more edges, every self-loop, and
// every adjacent pair that the activation rule excites in the same step when
// started from any node. An empty result means assembly is unambiguous.
std::vector<Hazard> detect_simultaneity_hazard(const NetworkGraph& graph,
                                               const EdgeIncidence& incidence);
std::vector<Hazard> detect_simultaneity_hazard(const NetworkGraph& graph);

// Splits every internal edge with 2x2 pass-through nodes. An ordinary edge e
// between a and b keeps its id on the lower-id endpoint and the other endpoint
// moves to a fresh edge; the original phase stays on e and the new edge gets
// phase 1. A self-loop is split by a chain of three pass-throughs so the
// resulting cycle has length four. Graphs without internal edges come back
// unchanged.
NetworkGraph normalize_loops(const NetworkGraph& graph);

}  // namespace qwnet
