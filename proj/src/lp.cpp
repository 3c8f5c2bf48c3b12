#include "cdad/lp.hpp"

#include "cdad/errors.hpp"

#include <cmath>
#include <vector>

namespace cdad::lp {

bool feasible(const Matrix& A_in, const Vector& b_in, double tol)
{
    if (A_in.rows() != b_in.size()) throw PreconditionError("lp::feasible: row count mismatch");
    const Eigen::Index nv = A_in.cols();

    // Normalize rows; a zero row is satisfied iff its rhs is nonnegative.
    std::vector<Eigen::Index> keep;
    Matrix A = A_in;
    Vector b = b_in;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double scale = A.row(i).cwiseAbs().maxCoeff();
        if (scale == 0.0) {
            if (b(i) < -tol) return false;
            continue;
        }
        A.row(i) /= scale;
        b(i) /= scale;
        keep.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(keep.size());
    if (m == 0) return true;

    std::vector<Eigen::Index> neg;
    for (Eigen::Index r = 0; r < m; ++r)
        if (b(keep[static_cast<std::size_t>(r)]) < 0.0) neg.push_back(r);
    if (neg.empty()) return true;  // x = 0 works

    // Columns: x (nv) | slack (m) | artificial (neg) | rhs
    const Eigen::Index na = static_cast<Eigen::Index>(neg.size());
    const Eigen::Index ncol = nv + m + na;
    Matrix T = Matrix::Zero(m, ncol + 1);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    Eigen::Index art = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index i = keep[static_cast<std::size_t>(r)];
        const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
        T.row(r).head(nv) = sgn * A.row(i);
        T(r, nv + r) = sgn;
        T(r, ncol) = sgn * b(i);
        if (sgn < 0.0) {
            T(r, nv + m + art) = 1.0;
            basis[static_cast<std::size_t>(r)] = nv + m + art;
            ++art;
        } else {
            basis[static_cast<std::size_t>(r)] = nv + r;
        }
    }

    // Reduced costs of the phase-1 objective (minimize the artificial sum).
    Vector d = Vector::Zero(ncol + 1);
    for (Eigen::Index r = 0; r < m; ++r)
        if (basis[static_cast<std::size_t>(r)] >= nv + m) d -= T.row(r).transpose();
    for (Eigen::Index j = nv + m; j < ncol; ++j) d(j) = 0.0;

    constexpr double piv_eps = 1e-12;
    const long max_iter = 50000 + 50 * (m + ncol);
    for (long iter = 0;; ++iter) {
        if (iter > max_iter) throw NumericError("lp::feasible: iteration limit reached");
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < ncol; ++j)
            if (d(j) < -piv_eps) {
                enter = j;
                break;
            }
        if (enter < 0) break;

        Eigen::Index leave = -1;
        double best = 0.0;
        for (Eigen::Index r = 0; r < m; ++r) {
            const double a = T(r, enter);
            if (a <= piv_eps) continue;
            const double ratio = T(r, ncol) / a;
            if (leave < 0 || ratio < best - 1e-15 ||
                (std::abs(ratio - best) <= 1e-15 &&
                 basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                leave = r;
                best = ratio;
            }
        }
        if (leave < 0) break;  // unbounded direction cannot occur in phase 1; stop defensively

        T.row(leave) /= T(leave, enter);
        for (Eigen::Index r = 0; r < m; ++r)
            if (r != leave && T(r, enter) != 0.0) T.row(r) -= T(r, enter) * T.row(leave);
        if (d(enter) != 0.0) d -= d(enter) * T.row(leave).transpose();
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    // -d(rhs) is the remaining artificial sum.
    return -d(ncol) <= tol * std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace cdad::lp
