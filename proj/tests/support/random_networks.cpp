#include "support/random_networks.hpp"

#include "qwnet/devices.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numbers>
#include <set>

namespace qwnet::testing {

CMatrix random_unitary(int n, Rng& rng) {
  std::normal_distribution<double> gauss;
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

Complex random_phase(Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return std::polar(1.0, angle(rng));
}

TwoPortScatterer random_two_port(Rng& rng) {
  return TwoPortScatterer::from_matrix(random_unitary(2, rng));
}

NetworkGraph random_hazard_free_network(Rng& rng, const RandomNetworkLimits& limits) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = uniform(1, limits.max_nodes);

  std::vector<int> side(n);
  for (int i = 0; i < n; ++i) side[i] = i < 2 ? i : uniform(0, 1);

  // Internal edges as node pairs (0-based), spanning tree first.
  std::vector<std::pair<int, int>> internal;
  std::set<std::pair<int, int>> used;
  auto add_pair = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (!used.insert(key).second) return false;
    internal.emplace_back(a, b);
    return true;
  };
  for (int i = 1; i < n; ++i) {
    std::vector<int> candidates;
    for (int j = 0; j < i; ++j) {
      if (side[j] != side[i]) candidates.push_back(j);
    }
    add_pair(i, candidates[uniform(0, static_cast<int>(candidates.size()) - 1)]);
  }
  const int room = limits.max_edges - static_cast<int>(internal.size()) - 1;
  const int extra = n >= 2 ? uniform(0, std::max(0, std::min(room, 4))) : 0;
  for (int k = 0, tries = 0; k < extra && tries < 50; ++tries) {
    const int a = uniform(0, n - 1);
    const int b = uniform(0, n - 1);
    if (side[a] != side[b] && add_pair(a, b)) ++k;
  }

  // Open ports: 0..2 per node, at least one overall, within the edge budget.
  std::vector<int> open_count(n, 0);
  int budget = limits.max_edges - static_cast<int>(internal.size());
  for (int i = 0; i < n && budget > 0; ++i) {
    open_count[i] = std::min(budget, uniform(0, 2));
    budget -= open_count[i];
  }
  if (std::all_of(open_count.begin(), open_count.end(), [](int c) { return c == 0; })) {
    open_count[uniform(0, n - 1)] = 1;
  }

  // Edge endpoint list, then a random global numbering.
  struct EdgeEnds { int a; int b; };  // b < 0 for open
  std::vector<EdgeEnds> edges;
  for (auto [a, b] : internal) edges.push_back({a, b});
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < open_count[i]; ++c) edges.push_back({i, -1});
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  const int d = static_cast<int>(edges.size());

  std::vector<std::vector<EdgeId>> ports(n);
  for (int e = 0; e < d; ++e) {
    ports[edges[e].a].push_back(e + 1);
    if (edges[e].b >= 0) ports[edges[e].b].push_back(e + 1);
  }
  std::vector<LocalScatterer> nodes;
  for (int i = 0; i < n; ++i) {
    std::shuffle(ports[i].begin(), ports[i].end(), rng);
    LocalScatterer s;
    s.id = i + 1;
    s.ports = ports[i];
    s.matrix = random_unitary(s.dim(), rng);
    nodes.push_back(std::move(s));
  }
  std::vector<Complex> phase(d, Complex(1.0, 0.0));
  if (limits.random_phases) {
    for (auto& z : phase) z = random_phase(rng);
  }
  return NetworkGraph(d, std::move(nodes), std::move(phase));
}

NetworkGraph two_port_chain_graph(std::span<const TwoPortScatterer> chain) {
  const int n = static_cast<int>(chain.size());
  std::vector<LocalScatterer> nodes;
  for (int k = 0; k < n; ++k) {
    LocalScatterer s;
    s.id = k + 1;
    s.matrix = chain[k].matrix();
    s.lossy = chain[k].lossy;
    const EdgeId left = k == 0 ? 1 : k + 2;
    const EdgeId right = k == n - 1 ? 2 : k + 3;
    s.ports = {left, right};
    nodes.push_back(std::move(s));
  }
  return NetworkGraph(n + 1, std::move(nodes));
}

LocalScatterer make_node(NodeId id, CMatrix matrix, std::vector<EdgeId> ports, std::string name) {
  LocalScatterer s;
  s.id = id;
  s.name = std::move(name);
  s.matrix = std::move(matrix);
  s.ports = std::move(ports);
  return s;
}

NetworkGraph self_loop_graph(const CMatrix& u, Complex loop_phase) {
  return NetworkGraph(3, {make_node(1, u, {1, 2, 3, 3})}, {1.0, 1.0, loop_phase});
}

NetworkGraph parallel_pair_graph(const CMatrix& ua, const CMatrix& ub, Complex p3, Complex p4) {
  return NetworkGraph(4, {make_node(1, ua, {1, 3, 4}), make_node(2, ub, {2, 3, 4})},
                      {1.0, 1.0, p3, p4});
}

NetworkGraph triangle_graph() {
  return NetworkGraph(6, {make_node(1, grover_coin(3), {1, 4, 6}),
                          make_node(2, grover_coin(3), {2, 4, 5}),
                          make_node(3, grover_coin(3), {3, 5, 6})});
}

}  // namespace qwnet::testing
