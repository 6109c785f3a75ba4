#include "qwnet/redheffer.hpp"

#include <Eigen/LU>

namespace qwnet {

TwoPortScatterer TwoPortScatterer::from_matrix(const CMatrix& m, bool lossy) {
  if (m.rows() != 2 || m.cols() != 2) throw ValidationError("two-port matrix must be 2x2");
  if (!all_finite(m)) throw ValidationError("two-port matrix has non-finite entries");
  if (!lossy && !(unitarity_defect(m) < kUnitarityTol)) {
    throw ValidationError("two-port matrix is not unitary; mark it lossy to allow this");
  }
  return {m(0, 0), m(1, 0), m(1, 1), m(0, 1), lossy};
}

CMatrix TwoPortScatterer::matrix() const {
  CMatrix m(2, 2);
  m << r, tau, t, rho;
  return m;
}

BlockTwoPort BlockTwoPort::from_matrix(const CMatrix& m, int left_ports) {
  if (m.rows() != m.cols() || left_ports < 1 || left_ports >= m.rows()) {
    throw ValidationError("block two-port needs a square matrix with ports on both sides");
  }
  const auto nl = left_ports;
  const auto nr = m.rows() - nl;
  return {m.topLeftCorner(nl, nl), m.bottomLeftCorner(nr, nl), m.bottomRightCorner(nr, nr),
          m.topRightCorner(nl, nr)};
}

CMatrix BlockTwoPort::matrix() const {
  const auto nl = r.rows();
  const auto nr = rho.rows();
  CMatrix m(nl + nr, nl + nr);
  m.topLeftCorner(nl, nl) = r;
  m.bottomLeftCorner(nr, nl) = t;
  m.bottomRightCorner(nr, nr) = rho;
  m.topRightCorner(nl, nr) = tau;
  return m;
}

TwoPortScatterer star(const TwoPortScatterer& s, const TwoPortScatterer& s1) {
  const Complex d1 = 1.0 - s.rho * s1.r;
  const Complex d2 = 1.0 - s1.r * s.rho;
  if (std::abs(d1) < kResonanceTol || std::abs(d2) < kResonanceTol) {
    throw ResonanceError("resonant star product: |1 - rho r1| < 1e-14", 0);
  }
  TwoPortScatterer out;
  out.r = s.r + s.tau * s1.r / d1 * s.t;
  out.tau = s.tau / d2 * s1.tau;
  out.t = s1.t / d1 * s.t;
  out.rho = s1.rho + s1.t * s.rho / d2 * s1.tau;
  out.lossy = s.lossy || s1.lossy;
  return out;
}

BlockTwoPort star(const BlockTwoPort& s, const BlockTwoPort& s1) {
  const auto k = s.rho.rows();
  if (s1.r.rows() != k) throw ValidationError("block two-ports do not share an interface");
  const CMatrix id = CMatrix::Identity(k, k);
  Eigen::PartialPivLU<CMatrix> lu1(id - s.rho * s1.r);
  Eigen::PartialPivLU<CMatrix> lu2(id - s1.r * s.rho);
  if (!(lu1.rcond() > kResonanceTol) || !(lu2.rcond() > kResonanceTol)) {
    throw ResonanceError("resonant block star product: I - rho r1 is singular", 0);
  }
  // (I - rho r1)^{-1} t and (I - r1 rho)^{-1} tau1, each applied as a solve.
  const CMatrix in_right = lu1.solve(s.t);
  const CMatrix in_left = lu2.solve(s1.tau);
  BlockTwoPort out;
  out.r = s.r + s.tau * s1.r * in_right;
  out.tau = s.tau * in_left;
  out.t = s1.t * in_right;
  out.rho = s1.rho + s1.t * s.rho * in_left;
  return out;
}

TwoPortScatterer chain(std::span<const TwoPortScatterer> scatterers) {
  if (scatterers.empty()) throw ValidationError("chain needs at least one scatterer");
  TwoPortScatterer acc = scatterers.front();
  for (std::size_t i = 1; i < scatterers.size(); ++i) {
    try {
      acc = star(acc, scatterers[i]);
    } catch (const ResonanceError&) {
      throw ResonanceError("resonant star product at chain position " + std::to_string(i), i);
    }
  }
  return acc;
}

}  // namespace qwnet
