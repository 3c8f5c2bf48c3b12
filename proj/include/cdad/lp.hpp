#pragma once

#include "cdad/box.hpp"

namespace cdad::lp {

/// Does some x >= 0 satisfy A x <= b? Dense two-phase simplex (only phase 1 is
/// needed) with Bland's anti-cycling rule. Rows are normalized before solving;
/// `tol` is the accepted residual infeasibility after normalization.
bool feasible(const Matrix& A, const Vector& b, double tol = 1e-9);

}  // namespace cdad::lp
