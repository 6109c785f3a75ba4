#include "qwnet/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qwnet {

namespace {

std::vector<Eigen::Index> indices(const std::vector<EdgeId>& edges) {
  std::vector<Eigen::Index> out;
  out.reserve(edges.size());
  for (EdgeId e : edges) out.push_back(e - 1);
  return out;
}

struct Factorization {
  Eigen::PartialPivLU<CMatrix> lu;
  double condition = 1.0;
};

Factorization factorize(const CMatrix& a1, const SolveOptions& options) {
  Factorization f;
  if (a1.rows() == 0) return f;
  const CMatrix m = CMatrix::Identity(a1.rows(), a1.cols()) - a1;
  f.lu.compute(m);
  const double rcond = f.lu.rcond();
  f.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!std::isfinite(f.condition) || f.condition > options.singular_threshold) {
    std::ostringstream os;
    os.precision(3);
    os << "singular system: I - A1 (internal block) has condition estimate " << f.condition
       << " (threshold " << options.singular_threshold
       << "); an internal mode is trapped at eigenvalue 1";
    throw SingularSystemError(os.str(), f.condition);
  }
  return f;
}

ScatteringSolution solve_with(const AssembledSystem& system, const BlockDecomposition& blocks,
                              const Factorization& f, const SolveOptions& options) {
  ScatteringSolution sol;
  sol.open_edges = blocks.open_edges;
  sol.condition_estimate = f.condition;
  CVector xs = blocks.XF;
  if (blocks.A1.rows() > 0) {
    const CVector y = f.lu.solve(blocks.XB);
    const CMatrix m = CMatrix::Identity(blocks.A1.rows(), blocks.A1.cols()) - blocks.A1;
    sol.residual = (m * y - blocks.XB).cwiseAbs().maxCoeff();
    xs += blocks.A2 * y;
    if (options.compute_spectral_radius) sol.spectral_radius = spectral_radius(blocks.A1);
  } else if (options.compute_spectral_radius) {
    sol.spectral_radius = 0.0;
  }
  for (std::size_t i = 0; i < system.open_phase.size(); ++i) xs(i) *= system.open_phase[i];
  sol.amplitudes = std::move(xs);
  return sol;
}

}  // namespace

Complex ScatteringSolution::amplitude(EdgeId edge) const {
  auto it = std::find(open_edges.begin(), open_edges.end(), edge);
  if (it == open_edges.end()) throw ValidationError("edge " + std::to_string(edge) + " is not an open port");
  return amplitudes(it - open_edges.begin());
}

BlockDecomposition block_decompose(const AssembledSystem& system) {
  BlockDecomposition b;
  b.open_edges = system.open_edges;
  b.internal_edges = system.internal_edges;
  const auto open = indices(system.open_edges);
  const auto internal = indices(system.internal_edges);

  for (std::size_t c = 0; c < open.size(); ++c) {
    for (std::size_t r = 0; r < open.size(); ++r) {
      const Complex want = r == c ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      if (system.A(open[r], open[c]) != want) {
        throw NumericalError("block structure violated: A(" + std::to_string(open[r] + 1) + ", " +
                             std::to_string(open[c] + 1) + ") should be " + (r == c ? "1" : "0"));
      }
    }
    for (auto r : internal) {
      if (system.A(r, open[c]) != Complex(0.0, 0.0)) {
        throw NumericalError("block structure violated: A(" + std::to_string(r + 1) + ", " +
                             std::to_string(open[c] + 1) + ") should be 0");
      }
    }
  }
  b.A1 = system.A(internal, internal);
  b.A2 = system.A(open, internal);
  b.XF = system.X0(open);
  b.XB = system.X0(internal);
  return b;
}

ScatteringSolution solve_steady_state(const AssembledSystem& system, const SolveOptions& options) {
  const BlockDecomposition blocks = block_decompose(system);
  return solve_with(system, blocks, factorize(blocks.A1, options), options);
}

ScatteringSolution solve_by_iteration(const AssembledSystem& system, double tol, int max_steps) {
  if (!(tol > 0.0)) throw ValidationError("iteration tolerance must be positive");
  const auto open = indices(system.open_edges);
  const auto internal = indices(system.internal_edges);

  CVector x = system.X0;
  CVector prev_open = x(open);
  double delta = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= max_steps; ++step) {
    x = system.A * x;
    const CVector cur_open = x(open);
    delta = open.empty() ? 0.0 : (cur_open - prev_open).cwiseAbs().maxCoeff();
    const double trapped = internal.empty() ? 0.0 : CVector(x(internal)).cwiseAbs().maxCoeff();
    prev_open = cur_open;
    if (delta < tol && trapped < tol) {
      ScatteringSolution sol;
      sol.open_edges = system.open_edges;
      sol.amplitudes = cur_open;
      for (std::size_t i = 0; i < system.open_phase.size(); ++i) sol.amplitudes(i) *= system.open_phase[i];
      sol.residual = delta;
      sol.iterations = step;
      sol.condition_estimate = std::numeric_limits<double>::quiet_NaN();
      return sol;
    }
  }
  std::ostringstream os;
  os << "fixed-point iteration did not converge in " << max_steps << " steps (last change " << delta
     << "); the internal spectral radius is probably close to 1";
  throw ConvergenceError(os.str(), max_steps, delta);
}

double spectral_radius(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ModeSpectrum internal_modes(const AssembledSystem& system) {
  const BlockDecomposition b = block_decompose(system);
  if (b.A1.rows() == 0) throw ValidationError("no internal edges");
  Eigen::ComplexEigenSolver<CMatrix> es(b.A1, false);
  ModeSpectrum spec;
  spec.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return spec;
}

CMatrix full_scattering_matrix(const NetworkGraph& graph, const SolveOptions& options) {
  const EdgeIncidence inc = build_incidence(graph);
  const auto open = inc.open_edges();
  const auto m = static_cast<Eigen::Index>(open.size());
  CMatrix s(m, m);

  struct Cached {
    CMatrix A;
    Factorization f;
  };
  std::vector<Cached> cache;
  for (Eigen::Index c = 0; c < m; ++c) {
    try {
      const AssembledSystem sys = assemble(graph, open[c]);
      const BlockDecomposition blocks = block_decompose(sys);
      auto hit = std::find_if(cache.begin(), cache.end(), [&](const Cached& k) { return k.A == sys.A; });
      if (hit == cache.end()) {
        cache.push_back({sys.A, factorize(blocks.A1, options)});
        hit = std::prev(cache.end());
      }
      s.col(c) = solve_with(sys, blocks, hit->f, options).amplitudes;
    } catch (const SingularSystemError& e) {
      throw SingularSystemError("port " + std::to_string(open[c]) + ": " + e.what(), e.condition());
    } catch (const NumericalError& e) {
      throw NumericalError("port " + std::to_string(open[c]) + ": " + e.what());
    }
  }
  return s;
}

}  // namespace qwnet
