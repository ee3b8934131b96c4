#pragma once

#include <Eigen/Dense>

#include "ssreg/model_index.hpp"

namespace ssreg {

//! Scale factor applied to the largest singular value when deciding numerical rank.
inline double rank_tolerance_scale(int n, int k) {
    return static_cast<double>(n > k ? n : k) * 1e-12;
}

struct RankResult {
    int rank = 0;
    bool full_rank = true;
    double smax = 0.0;       // largest singular value
    double threshold = 0.0;  // singular values at or below count as zero
};

//! Columns of X selected by xi (1-based members), in increasing order.
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& X, const ModelIndex& xi);

//! Numerical column rank of a dense matrix via its singular values.
RankResult numerical_rank(const Eigen::MatrixXd& A);

//! True iff X_xi has full column rank; also reports the computed rank.
RankResult is_full_rank(const Eigen::MatrixXd& X, const ModelIndex& xi);

//! Orthogonal projection of v onto the column span of X_xi.
//! Throws RankDeficiencyError when X_xi is numerically rank-deficient.
Eigen::VectorXd project_onto_model(const Eigen::MatrixXd& X, const ModelIndex& xi,
                                   const Eigen::VectorXd& v);

//! Least-squares coefficients of Y on the columns X_xi (full rank required).
Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const ModelIndex& xi,
                              const Eigen::VectorXd& Y);

//! Thin orthonormal basis for the column span of A (rank-revealing).
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A);

} // namespace ssreg
