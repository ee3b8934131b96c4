#include "ssreg/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ssreg/errors.hpp"

namespace ssreg {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& X, const ModelIndex& xi) {
    Eigen::MatrixXd out(X.rows(), xi.size());
    int c = 0;
    for (int j : xi.members()) {
        if (j < 1 || j > X.cols())
            throw std::invalid_argument("model index " + std::to_string(j) +
                                        " outside [1, " + std::to_string(X.cols()) + "]");
        out.col(c++) = X.col(j - 1);
    }
    return out;
}

RankResult numerical_rank(const Eigen::MatrixXd& A) {
    RankResult r;
    if (A.cols() == 0) return r;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    r.smax = sv.size() ? sv(0) : 0.0;
    r.threshold = r.smax * rank_tolerance_scale(static_cast<int>(A.rows()),
                                                static_cast<int>(A.cols()));
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > r.threshold) ++r.rank;
    r.full_rank = (r.rank == A.cols());
    return r;
}

RankResult is_full_rank(const Eigen::MatrixXd& X, const ModelIndex& xi) {
    if (xi.empty()) return RankResult{0, true, 0.0, 0.0};
    if (xi.size() > X.rows()) {
        RankResult r = numerical_rank(submatrix(X, xi));
        r.full_rank = false;
        return r;
    }
    return numerical_rank(submatrix(X, xi));
}

Eigen::VectorXd project_onto_model(const Eigen::MatrixXd& X, const ModelIndex& xi,
                                   const Eigen::VectorXd& v) {
    if (xi.empty()) return Eigen::VectorXd::Zero(v.size());
    RankResult r = is_full_rank(X, xi);
    if (!r.full_rank)
        throw RankDeficiencyError("cannot project onto a rank-deficient model " + xi.to_string(),
                                  r.rank, xi.size());
    Eigen::MatrixXd Xs = submatrix(X, xi);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Xs);
    Eigen::VectorXd w = qr.householderQ().adjoint() * v;
    w.tail(v.size() - xi.size()).setZero();
    return qr.householderQ() * w;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const ModelIndex& xi,
                              const Eigen::VectorXd& Y) {
    if (xi.empty()) return Eigen::VectorXd(0);
    RankResult r = is_full_rank(X, xi);
    if (!r.full_rank)
        throw RankDeficiencyError("least squares needs a full-rank model " + xi.to_string(),
                                  r.rank, xi.size());
    Eigen::MatrixXd Xs = submatrix(X, xi);
    return Xs.colPivHouseholderQr().solve(Y);
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A) {
    if (A.cols() == 0) return Eigen::MatrixXd(A.rows(), 0);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    int rank = static_cast<int>(qr.rank());
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), rank);
    return Q;
}

} // namespace ssreg
