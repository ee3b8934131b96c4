#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ssreg {

//! C(m, k) with saturation at the uint64 ceiling instead of overflow.
std::uint64_t binom_saturating(int m, int k);

//! sum_{j=0}^{kmax} C(m, j), saturating.
std::uint64_t subset_count_at_most(int m, int kmax);

//! Throws EnumerationBudgetError when needed > cap.
void require_budget(std::uint64_t needed, std::uint64_t cap);

//! Depth-first enumeration of subsets of `pool` (ascending element order) with
//! size in [min_size, max_size]. `visit` sees each subset once; returning
//! false prunes all supersets of the visited subset from the walk.
//!
//! Workers partition the walk by the pool position of a subset's first
//! element (position mod workers == worker_id); the empty subset belongs to
//! worker 0. The union of visits over all worker ids is independent of the
//! worker count.
void scan_subsets(const std::vector<int>& pool, int min_size, int max_size,
                  const std::function<bool(const std::vector<int>&)>& visit, int workers = 1,
                  int worker_id = 0);

//! Cholesky factorization of a growing/shrinking principal submatrix of a
//! fixed symmetric positive semi-definite matrix G, in stack (DFS) order.
//! Detects near-dependence of a candidate column against the current set.
class IncrementalCholesky {
  public:
    //! rel_tol scales the diagonal entry of the candidate column: the pivot
    //! must exceed rel_tol * G(j, j) for the push to succeed.
    IncrementalCholesky(const Eigen::MatrixXd& G, double rel_tol);

    //! Tries to extend the set with 0-based index j; returns false (and
    //! leaves the state unchanged) when the column is numerically dependent.
    bool try_push(int j);
    //! Removes the most recently pushed index.
    void pop();
    int size() const { return static_cast<int>(members_.size()); }

  private:
    const Eigen::MatrixXd& G_;
    double rel_tol_;
    Eigen::MatrixXd L_;
    std::vector<int> members_;
};

} // namespace ssreg
