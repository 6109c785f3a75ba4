#include "qwnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace qwnet {

namespace {

bool valid_label(const std::string& s) {
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) || c == '#';
  });
}

void check_node(const LocalScatterer& s, int edge_count) {
  const std::string who = "node " + std::to_string(s.id);
  if (s.ports.empty()) throw ValidationError(who + ": no ports");
  if (s.matrix.rows() != s.dim() || s.matrix.cols() != s.dim()) {
    throw ValidationError(who + ": matrix is " + std::to_string(s.matrix.rows()) + "x" +
                          std::to_string(s.matrix.cols()) + " but the node has " +
                          std::to_string(s.dim()) + " ports");
  }
  std::map<EdgeId, int> seen;
  for (EdgeId e : s.ports) {
    if (e < 1 || e > edge_count) {
      throw ValidationError(who + ": edge id " + std::to_string(e) + " out of range 1.." +
                            std::to_string(edge_count));
    }
    if (++seen[e] > 2) {
      throw ValidationError(who + ": edge " + std::to_string(e) + " listed more than twice");
    }
  }
  if (!all_finite(s.matrix)) throw ValidationError(who + ": matrix has non-finite entries");
  if (!s.lossy) {
    const double defect = unitarity_defect(s.matrix);
    if (!(defect < kUnitarityTol)) {
      throw ValidationError(who + ": matrix is not unitary (max |U^H U - I| = " +
                            std::to_string(defect) + "); mark the node lossy to allow this");
    }
  }
  if (!valid_label(s.name)) throw ValidationError(who + ": name contains whitespace or '#'");
}

}  // namespace

bool LocalScatterer::operator==(const LocalScatterer& other) const {
  if (id != other.id || name != other.name || ports != other.ports || lossy != other.lossy ||
      device != other.device) {
    return false;
  }
  if (matrix.rows() != other.matrix.rows() || matrix.cols() != other.matrix.cols()) return false;
  return matrix == other.matrix;
}

NetworkGraph::NetworkGraph(int edge_count, std::vector<LocalScatterer> nodes,
                           std::vector<Complex> phase, std::vector<std::string> edge_names)
    : edge_count_(edge_count),
      nodes_(std::move(nodes)),
      phase_(std::move(phase)),
      edge_names_(std::move(edge_names)) {
  if (edge_count_ < 1) throw ValidationError("network needs at least one edge");
  if (nodes_.empty()) throw ValidationError("network needs at least one node");

  std::vector<int> multiplicity(edge_count_, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const LocalScatterer& s = nodes_[i];
    if (s.id != static_cast<NodeId>(i) + 1) {
      throw ValidationError("node ids must be 1..n in order; found " + std::to_string(s.id) +
                            " at position " + std::to_string(i + 1));
    }
    check_node(s, edge_count_);
    for (EdgeId e : s.ports) ++multiplicity[e - 1];
  }
  for (EdgeId e = 1; e <= edge_count_; ++e) {
    const int m = multiplicity[e - 1];
    if (m > 2) {
      throw ValidationError("edge multiplicity > 2: edge " + std::to_string(e) +
                            " is attached " + std::to_string(m) + " times");
    }
    if (m == 0) throw ValidationError("edge " + std::to_string(e) + " is not attached to any node");
  }

  if (phase_.empty()) phase_.assign(edge_count_, Complex(1.0, 0.0));
  if (static_cast<int>(phase_.size()) != edge_count_) {
    throw ValidationError("phase vector has " + std::to_string(phase_.size()) +
                          " entries, expected " + std::to_string(edge_count_));
  }
  for (EdgeId e = 1; e <= edge_count_; ++e) {
    const Complex z = phase_[e - 1];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        !(std::abs(std::abs(z) - 1.0) < kUnitarityTol)) {
      throw ValidationError("phase of edge " + std::to_string(e) + " is not unit modulus");
    }
  }

  if (edge_names_.empty()) edge_names_.assign(edge_count_, std::string());
  if (static_cast<int>(edge_names_.size()) != edge_count_) {
    throw ValidationError("edge name list has the wrong length");
  }
  for (const auto& name : edge_names_) {
    if (!valid_label(name)) throw ValidationError("edge name contains whitespace or '#'");
  }
}

const LocalScatterer& NetworkGraph::node(NodeId id) const {
  if (id < 1 || id > node_count()) {
    throw ValidationError("node id " + std::to_string(id) + " out of range");
  }
  return nodes_[id - 1];
}

int EdgeIncidence::internal_edge_count() const {
  return static_cast<int>(std::count_if(nodes_of_edge.begin(), nodes_of_edge.end(),
                                        [](const auto& v) { return v.size() == 2; }));
}

std::vector<EdgeId> EdgeIncidence::open_edges() const {
  std::vector<EdgeId> out;
  for (const auto& p : open_ports) out.push_back(p.edge);
  return out;
}

std::vector<EdgeId> EdgeIncidence::internal_edges() const {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i < nodes_of_edge.size(); ++i) {
    if (nodes_of_edge[i].size() == 2) out.push_back(static_cast<EdgeId>(i) + 1);
  }
  return out;
}

NodeId EdgeIncidence::owner_of_open_edge(EdgeId e) const {
  if (e < 1 || e > static_cast<EdgeId>(nodes_of_edge.size())) {
    throw ValidationError("edge " + std::to_string(e) + " does not exist");
  }
  if (!is_open(e)) throw ValidationError("edge " + std::to_string(e) + " is not an open port");
  return nodes_of_edge[e - 1].front();
}

std::vector<std::vector<NodeId>> EdgeIncidence::neighbors(int node_count) const {
  std::vector<std::vector<NodeId>> out(node_count);
  for (const auto& ends : nodes_of_edge) {
    if (ends.size() != 2) continue;
    out[ends[0] - 1].push_back(ends[1]);
    out[ends[1] - 1].push_back(ends[0]);
  }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

EdgeIncidence build_incidence(const NetworkGraph& graph) {
  EdgeIncidence inc;
  inc.nodes_of_edge.resize(graph.edge_count());
  for (const auto& s : graph.nodes()) {
    for (EdgeId e : s.ports) inc.nodes_of_edge[e - 1].push_back(s.id);
  }
  for (EdgeId e = 1; e <= graph.edge_count(); ++e) {
    auto& ends = inc.nodes_of_edge[e - 1];
    std::sort(ends.begin(), ends.end());
    if (ends.size() == 1) inc.open_ports.push_back({ends.front(), e});
  }
  return inc;
}

std::string to_string(HazardKind kind) {
  switch (kind) {
    case HazardKind::ParallelEdges: return "parallel-edges";
    case HazardKind::SelfLoop: return "self-loop";
    case HazardKind::CoActivation: return "co-activation";
  }
  return "unknown";
}

std::string describe(const Hazard& h) {
  if (h.kind == HazardKind::SelfLoop) return "self-loop on node " + std::to_string(h.a);
  return to_string(h.kind) + " between nodes " + std::to_string(h.a) + " and " +
         std::to_string(h.b);
}

std::vector<Hazard> detect_simultaneity_hazard(const NetworkGraph& graph,
                                               const EdgeIncidence& incidence) {
  const int n = graph.node_count();
  std::set<std::pair<NodeId, NodeId>> parallel, coactive;
  std::set<NodeId> self_loops;
  std::map<std::pair<NodeId, NodeId>, int> pair_count;
  for (const auto& ends : incidence.nodes_of_edge) {
    if (ends.size() != 2) continue;
    if (ends[0] == ends[1]) {
      self_loops.insert(ends[0]);
    } else if (++pair_count[{ends[0], ends[1]}] == 2) {
      parallel.insert({ends[0], ends[1]});
    }
  }

  const auto adjacency = incidence.neighbors(n);
  for (NodeId start = 1; start <= n; ++start) {
    std::vector<char> active(n, 0);
    active[start - 1] = 1;
    std::set<std::vector<char>> visited;
    while (visited.insert(active).second) {
      for (const auto& [key, count] : pair_count) {
        if (active[key.first - 1] && active[key.second - 1]) coactive.insert(key);
      }
      std::vector<char> next(n, 0);
      for (NodeId j = 1; j <= n; ++j) {
        if (!active[j - 1]) continue;
        for (NodeId k : adjacency[j - 1]) next[k - 1] = 1;
      }
      active = std::move(next);
    }
  }

  std::vector<Hazard> out;
  for (const auto& [a, b] : parallel) out.push_back({HazardKind::ParallelEdges, a, b});
  for (NodeId a : self_loops) out.push_back({HazardKind::SelfLoop, a, a});
  for (const auto& [a, b] : coactive) out.push_back({HazardKind::CoActivation, a, b});
  return out;
}

std::vector<Hazard> detect_simultaneity_hazard(const NetworkGraph& graph) {
  return detect_simultaneity_hazard(graph, build_incidence(graph));
}

NetworkGraph normalize_loops(const NetworkGraph& graph) {
  const EdgeIncidence inc = build_incidence(graph);
  if (inc.internal_edge_count() == 0) return graph;

  std::vector<LocalScatterer> nodes = graph.nodes();
  std::vector<Complex> phase = graph.phase();
  std::vector<std::string> edge_names = graph.edge_names();
  int edge_count = graph.edge_count();

  CMatrix pass(2, 2);
  pass << 0.0, 1.0, 1.0, 0.0;
  auto new_edge = [&]() {
    ++edge_count;
    phase.emplace_back(1.0, 0.0);
    edge_names.emplace_back();
    return edge_count;
  };
  auto add_pass = [&](EdgeId left, EdgeId right, const std::string& name) {
    LocalScatterer p;
    p.id = static_cast<NodeId>(nodes.size()) + 1;
    p.name = name;
    p.matrix = pass;
    p.ports = {left, right};
    p.device = "pass";
    nodes.push_back(std::move(p));
  };
  // Rebinds the last occurrence of edge e on node b to a fresh edge.
  auto rebind_last = [&](NodeId b, EdgeId e) {
    auto& ports = nodes[b - 1].ports;
    auto it = std::find(ports.rbegin(), ports.rend(), e);
    const EdgeId fresh = new_edge();
    *it = fresh;
    return fresh;
  };

  for (EdgeId e = 1; e <= graph.edge_count(); ++e) {
    const auto& ends = inc.nodes_of_edge[e - 1];
    if (ends.size() != 2) continue;
    const std::string base = "pass" + std::to_string(e);
    if (ends[0] != ends[1]) {
      const EdgeId fresh = rebind_last(ends[1], e);
      add_pass(e, fresh, base);
    } else {
      const EdgeId tail = rebind_last(ends[0], e);
      const EdgeId m1 = new_edge();
      const EdgeId m2 = new_edge();
      add_pass(e, m1, base + "a");
      add_pass(m1, m2, base + "b");
      add_pass(m2, tail, base + "c");
    }
  }
  return NetworkGraph(edge_count, std::move(nodes), std::move(phase), std::move(edge_names));
}

}  // namespace qwnet
