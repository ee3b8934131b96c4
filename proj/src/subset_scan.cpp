#include "ssreg/subset_scan.hpp"

#include <limits>
#include <stdexcept>

#include "ssreg/errors.hpp"

namespace ssreg {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t add_sat(std::uint64_t a, std::uint64_t b) {
    return a > kSat - b ? kSat : a + b;
}

} // namespace

std::uint64_t binom_saturating(int m, int k) {
    if (k < 0 || k > m) return 0;
    k = std::min(k, m - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        // c * (m - k + i) / i, watching for overflow before the multiply
        std::uint64_t num = static_cast<std::uint64_t>(m - k + i);
        if (c > kSat / num) return kSat;
        c = c * num / static_cast<std::uint64_t>(i);
    }
    return c;
}

std::uint64_t subset_count_at_most(int m, int kmax) {
    if (m < 0) throw std::invalid_argument("subset_count_at_most needs m >= 0");
    std::uint64_t total = 0;
    for (int j = 0; j <= std::min(kmax, m); ++j) total = add_sat(total, binom_saturating(m, j));
    return total;
}

void require_budget(std::uint64_t needed, std::uint64_t cap) {
    if (needed > cap) throw EnumerationBudgetError(needed, cap);
}

namespace {

struct ScanState {
    const std::vector<int>* pool;
    int min_size;
    int max_size;
    const std::function<bool(const std::vector<int>&)>* visit;
    std::vector<int> current;
};

void scan_rec(ScanState& st, int next_pos) {
    const auto& pool = *st.pool;
    int depth = static_cast<int>(st.current.size());
    if (depth >= st.max_size) return;
    for (int i = next_pos; i < static_cast<int>(pool.size()); ++i) {
        st.current.push_back(pool[i]);
        bool descend = true;
        if (static_cast<int>(st.current.size()) >= st.min_size) {
            descend = (*st.visit)(st.current);
        }
        if (descend) scan_rec(st, i + 1);
        st.current.pop_back();
    }
}

} // namespace

void scan_subsets(const std::vector<int>& pool, int min_size, int max_size,
                  const std::function<bool(const std::vector<int>&)>& visit, int workers,
                  int worker_id) {
    if (min_size < 0 || max_size < min_size) {
        throw std::invalid_argument("scan_subsets needs 0 <= min_size <= max_size");
    }
    if (workers < 1 || worker_id < 0 || worker_id >= workers) {
        throw std::invalid_argument("scan_subsets needs 0 <= worker_id < workers");
    }
    ScanState st{&pool, min_size, max_size, &visit, {}};
    if (min_size == 0 && worker_id == 0) {
        if (!visit(st.current)) return;
    }
    if (max_size == 0) return;
    for (int i = worker_id; i < static_cast<int>(pool.size()); i += workers) {
        st.current.assign(1, pool[i]);
        bool descend = true;
        if (1 >= min_size) descend = visit(st.current);
        if (descend) scan_rec(st, i + 1);
    }
}

IncrementalCholesky::IncrementalCholesky(const Eigen::MatrixXd& G, double rel_tol)
    : G_(G), rel_tol_(rel_tol) {
    if (G.rows() != G.cols()) throw std::invalid_argument("IncrementalCholesky needs a square matrix");
    L_.resize(G.rows(), G.cols());
}

bool IncrementalCholesky::try_push(int j) {
    int k = size();
    double d = G_(j, j);
    if (k > 0) {
        // solve L w = G[members, j] by forward substitution
        Eigen::VectorXd w(k);
        for (int r = 0; r < k; ++r) {
            double v = G_(members_[r], j);
            for (int c = 0; c < r; ++c) v -= L_(r, c) * w(c);
            w(r) = v / L_(r, r);
        }
        d -= w.squaredNorm();
        L_.row(k).head(k) = w.transpose();
    }
    if (!(d > rel_tol_ * std::abs(G_(j, j)))) return false;
    L_(k, k) = std::sqrt(d);
    members_.push_back(j);
    return true;
}

void IncrementalCholesky::pop() {
    if (members_.empty()) throw std::logic_error("IncrementalCholesky::pop on empty set");
    members_.pop_back();
}

} // namespace ssreg
