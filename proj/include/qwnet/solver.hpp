#pragma once

#include "qwnet/assembly.hpp"
#include "qwnet/graph.hpp"

#include <optional>
#include <vector>

namespace qwnet {

// A with its edges reordered open-first: [[I, A2], [0, A1]].
struct BlockDecomposition {
  std::vector<EdgeId> open_edges;
  std::vector<EdgeId> internal_edges;
  CMatrix A1;  // internal -> internal
  CMatrix A2;  // internal -> open
  CVector XF;  // X0 on open edges
  CVector XB;  // X0 on internal edges
};

// Throws NumericalError("block structure violated ...") when the open x open
// block is not exactly I or the internal x open block is not exactly 0.
BlockDecomposition block_decompose(const AssembledSystem& system);

struct ScatteringSolution {
  std::vector<EdgeId> open_edges;  // ascending
  CVector amplitudes;              // aligned with open_edges
  // Closed form: max-norm residual of the internal linear solve.
  // Iterative: last open-port change between successive steps.
  double residual = 0.0;
  // 1 / rcond of (I - A1); 1 when there are no internal edges.
  double condition_estimate = 1.0;
  std::optional<double> spectral_radius;
  int iterations = 0;

  Complex amplitude(EdgeId edge) const;
};

struct SolveOptions {
  bool compute_spectral_radius = false;
  // Condition estimates above this are reported as a singular system.
  double singular_threshold = 1e14;
};

ScatteringSolution solve_steady_state(const AssembledSystem& system,
                                      const SolveOptions& options = {});

// Applies A to X0 until the open-port amplitudes move by less than `tol`
// (max-norm) and the amplitude left on internal edges is below `tol`.
ScatteringSolution solve_by_iteration(const AssembledSystem& system, double tol,
                                      int max_steps = 1'000'000);

struct ModeSpectrum {
  std::vector<Complex> eigenvalues;  // of A1; diagnostic only
};

ModeSpectrum internal_modes(const AssembledSystem& system);

double spectral_radius(const CMatrix& m);

// Probes every open port in ascending order and returns the
// (d - q) x (d - q) scattering matrix. Ports whose assemblies produce the same
// A share one factorization of I - A1. Errors carry the offending port.
CMatrix full_scattering_matrix(const NetworkGraph& graph, const SolveOptions& options = {});

}  // namespace qwnet
