#pragma once

#include "qwnet/types.hpp"

#include <span>

namespace qwnet {

// Two-port stored as [[r, tau], [t, rho]]: column 1 is the response to light
// entering from the left (r reflected, t transmitted to the right), column 2
// the response to light entering from the right. This is the transfer-line
// form v3 = t v1 + rho v4, v2 = r v1 + tau v4 with its rows swapped so that
// inputs and outputs share port labels.
struct TwoPortScatterer {
  Complex r;
  Complex t;
  Complex rho;
  Complex tau;
  bool lossy = false;

  // Throws ValidationError if the matrix is not 2x2, or not unitary within
  // 1e-12 and `lossy` is false.
  static TwoPortScatterer from_matrix(const CMatrix& m, bool lossy = false);
  CMatrix matrix() const;
};

// Operator-valued two-port; blocks may be any conforming sizes. The left
// side has n_l ports, the right side n_r: r is n_l x n_l, t is n_r x n_l,
// rho is n_r x n_r, tau is n_l x n_r.
struct BlockTwoPort {
  CMatrix r;
  CMatrix t;
  CMatrix rho;
  CMatrix tau;

  static BlockTwoPort from_matrix(const CMatrix& m, int left_ports);
  CMatrix matrix() const;
};

inline constexpr double kResonanceTol = 1e-14;

// Redheffer star product with `s` on the left and `s1` on the right.
// Throws ResonanceError when |1 - rho r1| < 1e-14.
TwoPortScatterer star(const TwoPortScatterer& s, const TwoPortScatterer& s1);

// Block form; the product order of every term is preserved. Throws
// ResonanceError when I - rho r1 is numerically singular.
BlockTwoPort star(const BlockTwoPort& s, const BlockTwoPort& s1);

// Left fold of star over a non-empty list. A resonance is reported with the
// index of the right-hand factor at which it occurred.
TwoPortScatterer chain(std::span<const TwoPortScatterer> scatterers);

}  // namespace qwnet
