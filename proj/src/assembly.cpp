#include "qwnet/assembly.hpp"

#include "qwnet/devices.hpp"

#include <algorithm>
#include <sstream>

namespace qwnet {

GlobalScatteringMatrix embed_local(const NetworkGraph& graph, NodeId node) {
  const LocalScatterer& s = graph.node(node);
  const int d = graph.edge_count();
  GlobalScatteringMatrix g;
  g.node_id = node;
  g.edges = s.ports;
  g.matrix = CMatrix::Identity(d, d);
  for (int k = 0; k < s.dim(); ++k) {
    for (int l = 0; l < s.dim(); ++l) {
      g.matrix(s.ports[k] - 1, s.ports[l] - 1) = s.matrix(k, l);
    }
  }
  return g;
}

GlobalScatteringMatrix apply_open_boundary(GlobalScatteringMatrix gsm,
                                           std::span<const EdgeId> open_cols) {
  for (EdgeId e : open_cols) {
    if (std::find(gsm.edges.begin(), gsm.edges.end(), e) == gsm.edges.end()) {
      throw ValidationError("edge " + std::to_string(e) + " is not a port of node " +
                            std::to_string(gsm.node_id));
    }
    gsm.matrix.col(e - 1).setZero();
    gsm.matrix(e - 1, e - 1) = 1.0;
  }
  gsm.boundary_adjusted = true;
  return gsm;
}

ActivationSequence propagate_activations(const NetworkGraph& graph,
                                         const EdgeIncidence& incidence, NodeId input_node) {
  const int n = graph.node_count();
  if (input_node < 1 || input_node > n) {
    throw ValidationError("input node " + std::to_string(input_node) + " does not exist");
  }
  const auto adjacency = incidence.neighbors(n);

  // Reachability first so the while-loop below is guaranteed to terminate.
  std::vector<char> reached(n, 0);
  std::vector<NodeId> stack{input_node};
  reached[input_node - 1] = 1;
  while (!stack.empty()) {
    const NodeId j = stack.back();
    stack.pop_back();
    for (NodeId k : adjacency[j - 1]) {
      if (!reached[k - 1]) {
        reached[k - 1] = 1;
        stack.push_back(k);
      }
    }
  }
  std::string unreachable;
  for (NodeId j = 1; j <= n; ++j) {
    if (!reached[j - 1]) unreachable += (unreachable.empty() ? "" : ", ") + std::to_string(j);
  }
  if (!unreachable.empty()) {
    throw ValidationError("graph is disconnected: nodes {" + unreachable +
                          "} are unreachable from node " + std::to_string(input_node));
  }

  auto step = [&](const std::vector<NodeId>& active) {
    std::vector<char> mark(n, 0);
    for (NodeId j : active) {
      for (NodeId k : adjacency[j - 1]) mark[k - 1] = 1;
    }
    std::vector<NodeId> out;
    for (NodeId j = 1; j <= n; ++j) {
      if (mark[j - 1]) out.push_back(j);
    }
    return out;
  };

  ActivationSequence seq;
  seq.input_node = input_node;
  seq.steps.push_back({input_node});
  std::vector<char> visited(n, 0);
  visited[input_node - 1] = 1;
  int remaining = n - 1;
  while (remaining > 0) {
    seq.steps.push_back(step(seq.steps.back()));
    for (NodeId j : seq.steps.back()) {
      if (!visited[j - 1]) {
        visited[j - 1] = 1;
        --remaining;
      }
    }
  }
  seq.transient_horizon = static_cast<int>(seq.steps.size()) - 1;
  seq.steps.push_back(step(seq.steps.back()));
  return seq;
}

ActivationSequence propagate_activations(const NetworkGraph& graph, NodeId input_node) {
  return propagate_activations(graph, build_incidence(graph), input_node);
}

AssemblyPlan plan_assembly(const NetworkGraph& graph, EdgeId input_edge) {
  AssemblyPlan plan;
  plan.incidence = build_incidence(graph);
  plan.input_edge = input_edge;
  plan.input_node = plan.incidence.owner_of_open_edge(input_edge);
  const auto hazards = detect_simultaneity_hazard(graph, plan.incidence);
  if (!hazards.empty()) {
    std::string msg = "graph has simultaneity hazards (" + describe(hazards.front());
    if (hazards.size() > 1) msg += " and " + std::to_string(hazards.size() - 1) + " more";
    msg += "); apply normalize_loops before assembly";
    throw HazardError(msg);
  }
  plan.activations = propagate_activations(graph, plan.incidence, plan.input_node);
  return plan;
}

namespace {

// Left-multiplies `m` by the embedding of `block` on `edges`. Only rows in
// `edges` change, which is what makes the embedded operators cheap to apply.
void apply_left(const CMatrix& block, const std::vector<EdgeId>& edges, CMatrix& m) {
  const auto k = static_cast<Eigen::Index>(edges.size());
  CMatrix rows(k, m.cols());
  for (Eigen::Index r = 0; r < k; ++r) rows.row(r) = m.row(edges[r] - 1);
  const CMatrix updated = block * rows;
  for (Eigen::Index r = 0; r < k; ++r) m.row(edges[r] - 1) = updated.row(r);
}

}  // namespace

AssembledSystem assemble(const NetworkGraph& graph, const AssemblyPlan& plan, FactorOrder order) {
  const int d = graph.edge_count();
  const EdgeIncidence& inc = plan.incidence;
  for (const auto& s : graph.nodes()) {
    for (EdgeId e : s.ports) {
      const auto& ends = inc.nodes_of_edge.at(e - 1);
      if (std::find(ends.begin(), ends.end(), s.id) == ends.end()) {
        throw ValidationError("assembly plan does not match the graph topology");
      }
    }
  }

  // Boundary-adjusted local blocks: a column whose edge is open becomes the
  // local unit vector, which is the embedded e_k restricted to the node.
  std::vector<CMatrix> adjusted;
  adjusted.reserve(graph.node_count());
  for (const auto& s : graph.nodes()) {
    CMatrix b = s.matrix;
    for (int k = 0; k < s.dim(); ++k) {
      if (inc.is_open(s.ports[k])) {
        b.col(k).setZero();
        b(k, k) = 1.0;
      }
    }
    adjusted.push_back(std::move(b));
  }

  // Only internal edges carry a propagation phase inside the dynamics.
  std::vector<std::pair<int, Complex>> internal_phase;
  for (EdgeId e : inc.internal_edges()) {
    if (graph.phase(e) != Complex(1.0, 0.0)) internal_phase.emplace_back(e - 1, graph.phase(e));
  }
  auto apply_phase = [&](CMatrix& m) {
    for (const auto& [row, z] : internal_phase) m.row(row) *= z;
  };
  auto apply_step = [&](const std::vector<NodeId>& active, CMatrix& m) {
    auto run = [&](NodeId j) { apply_left(adjusted[j - 1], graph.node(j).ports, m); };
    if (order == FactorOrder::Ascending) {
      std::for_each(active.begin(), active.end(), run);
    } else {
      std::for_each(active.rbegin(), active.rend(), run);
    }
    apply_phase(m);
  };

  const ActivationSequence& seq = plan.activations;
  const int t0 = seq.transient_horizon;

  AssembledSystem sys;
  sys.input_edge = plan.input_edge;
  sys.open_edges = inc.open_edges();
  sys.internal_edges = inc.internal_edges();
  for (EdgeId e : sys.open_edges) sys.open_phase.push_back(graph.phase(e));

  sys.A0 = embed_local(graph, plan.input_node).matrix;
  sys.A = CMatrix::Identity(d, d);
  if (t0 > 0) {
    apply_phase(sys.A0);
    for (int t = 1; t < t0; ++t) apply_step(seq.steps[t], sys.A0);
    apply_step(seq.steps[t0], sys.A);
    apply_step(seq.steps[t0 + 1], sys.A);
  }
  sys.X0 = sys.A0.col(plan.input_edge - 1);
  return sys;
}

AssembledSystem assemble(const NetworkGraph& graph, EdgeId input_edge, FactorOrder order) {
  return assemble(graph, plan_assembly(graph, input_edge), order);
}

std::string dump_matrix(const CMatrix& m) {
  std::ostringstream os;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
    }
    os << '\n';
  }
  return os.str();
}

std::string dump_system(const AssembledSystem& system) {
  std::ostringstream os;
  os << "input_edge " << system.input_edge << "\nopen";
  for (EdgeId e : system.open_edges) os << ' ' << e;
  os << "\ninternal";
  for (EdgeId e : system.internal_edges) os << ' ' << e;
  os << "\nA " << system.A.rows() << ' ' << system.A.cols() << '\n' << dump_matrix(system.A);
  os << "A0 " << system.A0.rows() << ' ' << system.A0.cols() << '\n' << dump_matrix(system.A0);
  os << "X0 " << system.X0.size() << '\n' << dump_matrix(system.X0.transpose());
  return os.str();
}

}  // namespace qwnet
