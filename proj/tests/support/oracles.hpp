#pragma once

// Reference computations that share no code path with assembly or the block
// solver. They are used to freeze expected values and to cross-check.

#include "qwnet/assembly.hpp"
#include "qwnet/graph.hpp"

namespace qwnet::testing {

// Solves the scattering equations on directed edge modes,
//   in(b, j) = phase_e * out(a, i),  out = U * in + injection,
// by summing the Neumann series of the round-trip operator until the terms
// drop below 1e-17. Open ports pick up their edge phase once on exit.
// Handles self-loops and parallel edges directly.
CMatrix directed_mode_series(const NetworkGraph& graph, int max_terms = 2'000'000);

// Ring motif: a 4-port u whose local ports 0,1 are open and 2,3 are joined
// by one loop edge with phase p. Output = u_oo + u_ol sum_k (p J u_ll)^k p J u_lo.
CMatrix self_loop_ring_series(const CMatrix& u, Complex p);

// Parallel-edge motif: 3-ports ua, ub with local port 0 open and ports 1, 2
// joined pairwise by edges with phases p1, p2. Columns: input at ua's open
// port, input at ub's open port.
CMatrix parallel_pair_series(const CMatrix& ua, const CMatrix& ub, Complex p1, Complex p2);

// A and A0 by explicit dense products of embed_local / apply_open_boundary
// matrices and the full phase matrix restricted to internal edges.
AssembledSystem dense_product_assembly(const NetworkGraph& graph, EdgeId input_edge);

}  // namespace qwnet::testing
