#include "support/oracles.hpp"

#include <map>

namespace qwnet::testing {

CMatrix directed_mode_series(const NetworkGraph& graph, int max_terms) {
  // Slot = (node, local port). Every slot has an incoming and outgoing mode.
  std::vector<std::pair<NodeId, int>> slots;
  std::map<std::pair<NodeId, int>, int> slot_of;
  for (const auto& s : graph.nodes()) {
    for (int k = 0; k < s.dim(); ++k) {
      slot_of[{s.id, k}] = static_cast<int>(slots.size());
      slots.emplace_back(s.id, k);
    }
  }
  const int m = static_cast<int>(slots.size());
  std::vector<std::vector<int>> slots_of_edge(graph.edge_count());
  for (int i = 0; i < m; ++i) {
    const auto [node, k] = slots[i];
    slots_of_edge[graph.node(node).ports[k] - 1].push_back(i);
  }

  // scatter: incoming -> outgoing, block diagonal over nodes.
  CMatrix scatter = CMatrix::Zero(m, m);
  for (const auto& s : graph.nodes()) {
    for (int r = 0; r < s.dim(); ++r) {
      for (int c = 0; c < s.dim(); ++c) {
        scatter(slot_of[{s.id, r}], slot_of[{s.id, c}]) = s.matrix(r, c);
      }
    }
  }
  // link: outgoing -> incoming across internal edges.
  CMatrix link = CMatrix::Zero(m, m);
  std::vector<EdgeId> open;
  for (EdgeId e = 1; e <= graph.edge_count(); ++e) {
    const auto& ends = slots_of_edge[e - 1];
    if (ends.size() == 2) {
      link(ends[1], ends[0]) = graph.phase(e);
      link(ends[0], ends[1]) = graph.phase(e);
    } else {
      open.push_back(e);
    }
  }
  const CMatrix round_trip = link * scatter;

  const auto np = static_cast<Eigen::Index>(open.size());
  CMatrix s_matrix(np, np);
  for (Eigen::Index c = 0; c < np; ++c) {
    CVector inject = CVector::Zero(m);
    inject(slots_of_edge[open[c] - 1][0]) = 1.0;
    // Incoming amplitudes: sum_k (link scatter)^k link scatter inject, plus the
    // external injection itself.
    CVector term = link * (scatter * inject);
    CVector incoming = inject + term;
    for (int k = 0; k < max_terms && term.cwiseAbs().maxCoeff() > 1e-17; ++k) {
      term = round_trip * term;
      incoming += term;
    }
    const CVector outgoing = scatter * incoming;
    for (Eigen::Index r = 0; r < np; ++r) {
      s_matrix(r, c) = graph.phase(open[r]) * outgoing(slots_of_edge[open[r] - 1][0]);
    }
  }
  return s_matrix;
}

CMatrix self_loop_ring_series(const CMatrix& u, Complex p) {
  const CMatrix uoo = u.topLeftCorner(2, 2);
  const CMatrix uol = u.topRightCorner(2, 2);
  const CMatrix ulo = u.bottomLeftCorner(2, 2);
  const CMatrix ull = u.bottomRightCorner(2, 2);
  CMatrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const CMatrix hop = p * swap;          // output at one loop port re-enters at the other
  const CMatrix ratio = hop * ull;
  CMatrix term = hop * ulo;
  CMatrix sum = term;
  for (int k = 0; k < 1'000'000 && term.cwiseAbs().maxCoeff() > 1e-17; ++k) {
    term = ratio * term;
    sum += term;
  }
  return uoo + uol * sum;
}

CMatrix parallel_pair_series(const CMatrix& ua, const CMatrix& ub, Complex p1, Complex p2) {
  CMatrix ph = CMatrix::Zero(2, 2);
  ph(0, 0) = p1;
  ph(1, 1) = p2;
  auto column = [&](const CMatrix& u_in, const CMatrix& u_out) {
    // Light enters u_in's open port, bounces between the two nodes.
    const CMatrix in_oo = u_in.topLeftCorner(1, 1);
    const CMatrix in_oi = u_in.topRightCorner(1, 2);
    const CMatrix in_io = u_in.bottomLeftCorner(2, 1);
    const CMatrix in_ii = u_in.bottomRightCorner(2, 2);
    const CMatrix out_oi = u_out.topRightCorner(1, 2);
    const CMatrix out_ii = u_out.bottomRightCorner(2, 2);
    // incoming at u_in's internal ports after k round trips
    const CMatrix ratio = ph * out_ii * ph * in_ii;
    CMatrix term = ph * out_ii * ph * in_io;
    CMatrix back = term;
    for (int k = 0; k < 1'000'000 && term.cwiseAbs().maxCoeff() > 1e-17; ++k) {
      term = ratio * term;
      back += term;
    }
    const CMatrix toward_out = ph * (in_io + in_ii * back);  // incoming at u_out
    CVector col(2);
    col(0) = (in_oo + in_oi * back)(0, 0);
    col(1) = (out_oi * toward_out)(0, 0);
    return col;
  };
  CMatrix s(2, 2);
  s.col(0) = column(ua, ub);
  const CVector c2 = column(ub, ua);
  s(0, 1) = c2(1);
  s(1, 1) = c2(0);
  return s;
}

AssembledSystem dense_product_assembly(const NetworkGraph& graph, EdgeId input_edge) {
  const AssemblyPlan plan = plan_assembly(graph, input_edge);
  const EdgeIncidence& inc = plan.incidence;
  const int d = graph.edge_count();

  std::vector<CMatrix> adjusted;
  for (const auto& s : graph.nodes()) {
    std::vector<EdgeId> open_cols;
    for (EdgeId e : s.ports) {
      if (inc.is_open(e)) open_cols.push_back(e);
    }
    adjusted.push_back(apply_open_boundary(embed_local(graph, s.id), open_cols).matrix);
  }
  CMatrix phi = CMatrix::Identity(d, d);
  for (EdgeId e : inc.internal_edges()) phi(e - 1, e - 1) = graph.phase(e);

  auto step = [&](const std::vector<NodeId>& active) {
    CMatrix m = CMatrix::Identity(d, d);
    for (NodeId j : active) m = adjusted[j - 1] * m;
    return CMatrix(phi * m);
  };
  const auto& seq = plan.activations;
  const int t0 = seq.transient_horizon;

  AssembledSystem sys;
  sys.input_edge = input_edge;
  sys.open_edges = inc.open_edges();
  sys.internal_edges = inc.internal_edges();
  for (EdgeId e : sys.open_edges) sys.open_phase.push_back(graph.phase(e));
  sys.A0 = embed_local(graph, plan.input_node).matrix;
  sys.A = CMatrix::Identity(d, d);
  if (t0 > 0) {
    sys.A0 = phi * sys.A0;
    for (int t = 1; t < t0; ++t) sys.A0 = step(seq.steps[t]) * sys.A0;
    sys.A = step(seq.steps[t0 + 1]) * step(seq.steps[t0]);
  }
  sys.X0 = sys.A0.col(input_edge - 1);
  return sys;
}

}  // namespace qwnet::testing
