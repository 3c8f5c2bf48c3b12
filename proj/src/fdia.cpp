#include "cdad/errors.hpp"
#include "cdad/simulator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>

namespace cdad {

const char* to_string(FdiaClassification::Verdict v)
{
    switch (v) {
    case FdiaClassification::Verdict::feasible: return "feasible";
    case FdiaClassification::Verdict::infeasible: return "infeasible";
    case FdiaClassification::Verdict::indeterminate: return "indeterminate";
    }
    return "infeasible";
}

FdiaClassification classify_fdia(const HybridAutomaton& model, StateId q,
                                 const std::vector<int>& gamma)
{
    using CMatrix = Eigen::MatrixXcd;
    const Matrix& A = model.state(q).dynamics.A;
    const auto n = A.rows();
    std::set<int> selected;
    for (int a : gamma) {
        if (a < 0 || a >= n) throw PreconditionError("gamma axis " + std::to_string(a) + " out of range");
        selected.insert(a);
    }

    FdiaClassification out;
    out.message = "anomaly will increase the residual";
    if (selected.empty()) return out;

    const Eigen::VectorXcd eig = Eigen::EigenSolver<Matrix>(A, false).eigenvalues();
    constexpr double kCluster = 1e-7;
    bool indeterminate = false;
    for (Eigen::Index e = 0; e < eig.size(); ++e) {
        const std::complex<double> lambda = eig(e);
        if (std::abs(lambda) < 1.0 - kEigenTolerance) continue;

        int algebraic = 0;
        for (Eigen::Index j = 0; j < eig.size(); ++j)
            if (std::abs(eig(j) - lambda) <= kCluster) ++algebraic;
        const CMatrix shifted = A.cast<std::complex<double>>() - lambda * CMatrix::Identity(n, n);
        Eigen::FullPivLU<CMatrix> lu(shifted);
        lu.setThreshold(1e-9);
        const auto geometric = n - lu.rank();
        if (geometric < algebraic) {
            indeterminate = true;
            continue;
        }

        CMatrix cols(n, static_cast<Eigen::Index>(selected.size()));
        Eigen::Index c = 0;
        for (int a : selected) cols.col(c++) = shifted.col(a);
        Eigen::FullPivLU<CMatrix> sub(cols);
        sub.setThreshold(1e-9);
        if (sub.rank() >= cols.cols()) continue;

        const Eigen::VectorXcd coeff = sub.kernel().col(0);
        Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(n);
        c = 0;
        for (int a : selected) xi(a) = coeff(c++);
        Eigen::Index big = 0;
        xi.cwiseAbs().maxCoeff(&big);
        xi /= xi(big);

        out.verdict = FdiaClassification::Verdict::feasible;
        out.eigenvalue = lambda;
        out.eigenvector = xi.real();
        out.message = "critical eigenvector lies in the attacked coordinates";
        return out;
    }
    if (indeterminate) {
        out.verdict = FdiaClassification::Verdict::indeterminate;
        out.message = "critical eigenvalue is defective; no full eigenvector basis";
    }
    return out;
}

}  // namespace cdad
