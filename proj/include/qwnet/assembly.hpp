#pragma once

#include "qwnet/graph.hpp"
#include "qwnet/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace qwnet {

// A node's local matrix embedded into the d x d identity.
struct GlobalScatteringMatrix {
  NodeId node_id = 0;
  std::vector<EdgeId> edges;  // the node's global edges, in local port order
  CMatrix matrix;
  bool boundary_adjusted = false;
};

GlobalScatteringMatrix embed_local(const NetworkGraph& graph, NodeId node);

// Replaces each listed column k by the basis vector e_k so amplitude on an
// open port stays put. Throws ValidationError for columns the node does not
// own.
GlobalScatteringMatrix apply_open_boundary(GlobalScatteringMatrix gsm,
                                           std::span<const EdgeId> open_cols);

struct ActivationSequence {
  // steps[T] lists the nodes active at time T (ascending), T = 0..T0+1.
  std::vector<std::vector<NodeId>> steps;
  // T0: first step at which every node has been active at least once.
  int transient_horizon = 0;
  NodeId input_node = 0;
};

// Runs the neighbor-activation rule from `input_node`. Throws
// ValidationError naming the unreachable nodes when the graph is
// disconnected.
ActivationSequence propagate_activations(const NetworkGraph& graph,
                                         const EdgeIncidence& incidence, NodeId input_node);
ActivationSequence propagate_activations(const NetworkGraph& graph, NodeId input_node);

// Value-independent part of an assembly: everything that depends only on the
// topology and the input port. Reusable across parameter sweeps as long as
// the ports of every node stay the same.
struct AssemblyPlan {
  EdgeIncidence incidence;
  EdgeId input_edge = 0;
  NodeId input_node = 0;
  ActivationSequence activations;
};

// Throws HazardError when the graph needs normalize_loops first, and
// ValidationError when input_edge is not an open port.
AssemblyPlan plan_assembly(const NetworkGraph& graph, EdgeId input_edge);

enum class FactorOrder { Ascending, Descending };

struct AssembledSystem {
  CMatrix A;   // repeating two-step evolution operator
  CMatrix A0;  // transient injection operator
  CVector X0;  // A0 applied to the unit input on input_edge
  std::vector<EdgeId> open_edges;      // ascending
  std::vector<EdgeId> internal_edges;  // ascending
  EdgeId input_edge = 0;
  // Propagation phase of each open edge (aligned with open_edges). Light
  // leaving the network picks it up once; it is not part of A.
  std::vector<Complex> open_phase;
};

// Builds A and A0. Within a time step, co-active nodes are applied in the
// given id order; on hazard-free graphs both orders give identical bits.
AssembledSystem assemble(const NetworkGraph& graph, const AssemblyPlan& plan,
                         FactorOrder order = FactorOrder::Ascending);
AssembledSystem assemble(const NetworkGraph& graph, EdgeId input_edge,
                         FactorOrder order = FactorOrder::Ascending);

// Row-major "re im" pairs, one matrix row per line, full precision.
std::string dump_matrix(const CMatrix& m);
std::string dump_system(const AssembledSystem& system);

}  // namespace qwnet
