#include "ssreg/eigenvals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ssreg/errors.hpp"
#include "ssreg/linalg.hpp"
#include "ssreg/rng.hpp"
#include "ssreg/subset_scan.hpp"

namespace ssreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

//! Running minimum with a deterministic tie-break on the witness, so the
//! result does not depend on enumeration order (and hence worker count).
struct Best {
    double value = kInf;
    ModelIndex witness;
    bool any = false;

    void offer(double v, const ModelIndex& m) {
        if (!any || v < value || (v == value && m < witness)) {
            value = v;
            witness = m;
            any = true;
        }
    }
    void merge(const Best& other) {
        if (other.any) offer(other.value, other.witness);
    }
};

template <typename WorkFn>
Best run_partitioned(int workers, WorkFn fn) {
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    std::vector<Best> locals(workers);
    if (workers == 1) {
        fn(0, locals[0]);
    } else {
        std::vector<std::exception_ptr> errs(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    fn(w, locals[w]);
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errs) {
            if (e) std::rethrow_exception(e);
        }
    }
    Best out;
    for (const Best& b : locals) out.merge(b);
    return out;
}

Eigen::MatrixXd normalized_gram(const Eigen::MatrixXd& X) {
    return X.transpose() * X / static_cast<double>(X.rows());
}

Eigen::MatrixXd gram_submatrix(const Eigen::MatrixXd& G, const std::vector<int>& idx0) {
    int k = static_cast<int>(idx0.size());
    Eigen::MatrixXd sub(k, k);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) sub(r, c) = G(idx0[r], idx0[c]);
    }
    return sub;
}

double lambda_min_of(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues()(0));
}

std::vector<int> complement_pool0(int p, const ModelIndex& xi_star) {
    std::vector<int> pool;
    pool.reserve(p - xi_star.size());
    for (int j = 1; j <= p; ++j) {
        if (!xi_star.contains(j)) pool.push_back(j - 1);
    }
    return pool;
}

std::vector<int> to_zero_based(const ModelIndex& m) {
    std::vector<int> v;
    v.reserve(m.size());
    for (int j : m.members()) v.push_back(j - 1);
    return v;
}

ModelIndex to_one_based(const std::vector<int>& idx0) {
    std::vector<int> v;
    v.reserve(idx0.size());
    for (int j : idx0) v.push_back(j + 1);
    return ModelIndex(v);
}

//! Depth-first walk over full-rank complement subsets for muev; rank-deficient
//! branches are pruned (every superset of a dependent set is dependent).
struct MuevWalk {
    const Eigen::MatrixXd& G;
    const std::vector<int>& pool0;    // complement of xi_star, 0-based
    const std::vector<int>& star0;    // xi_star, 0-based sorted
    int max_extra;
    IncrementalCholesky chol;
    std::vector<int> gamma0;
    Best* best;

    MuevWalk(const Eigen::MatrixXd& G_, const std::vector<int>& pool_,
             const std::vector<int>& star_, int max_extra_, double rel_tol, Best* best_)
        : G(G_), pool0(pool_), star0(star_), max_extra(max_extra_), chol(G_, rel_tol),
          best(best_) {}

    void consider() {
        std::vector<int> u0;
        u0.reserve(star0.size() + gamma0.size());
        std::vector<int> g_sorted = gamma0;
        std::sort(g_sorted.begin(), g_sorted.end());
        std::merge(star0.begin(), star0.end(), g_sorted.begin(), g_sorted.end(),
                   std::back_inserter(u0));
        if (u0.empty()) return;
        best->offer(lambda_min_of(gram_submatrix(G, u0)), to_one_based(gamma0));
    }

    void walk(int from) {
        if (static_cast<int>(gamma0.size()) >= max_extra) return;
        for (int i = from; i < static_cast<int>(pool0.size()); ++i) {
            if (!chol.try_push(pool0[i])) continue;
            gamma0.push_back(pool0[i]);
            consider();
            walk(i + 1);
            gamma0.pop_back();
            chol.pop();
        }
    }
};

} // namespace

FunctionalResult muev(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t,
                      std::uint64_t cap, int workers) {
    const int p = static_cast<int>(X.cols());
    const int n = static_cast<int>(X.rows());
    const int s = xi_star.size();
    if (xi_star.max_member() > p) throw std::invalid_argument("xi_star exceeds dimension p");
    if (t < s) throw std::invalid_argument("muev needs t >= |xi_star|");
    const int max_extra = std::min(t - s, p - s);
    std::vector<int> pool0 = complement_pool0(p, xi_star);
    require_budget(subset_count_at_most(static_cast<int>(pool0.size()), max_extra), cap);

    const Eigen::MatrixXd G = normalized_gram(X);
    const std::vector<int> star0 = to_zero_based(xi_star);
    const double rel_tol = rank_tolerance_scale(n, p);

    Best best = run_partitioned(workers, [&](int worker_id, Best& local) {
        MuevWalk walk(G, pool0, star0, max_extra, rel_tol, &local);
        if (worker_id == 0 && !star0.empty()) {
            walk.consider();  // gamma = empty: the bare true model
        }
        for (int i = worker_id; i < static_cast<int>(pool0.size()); i += workers) {
            if (max_extra < 1) break;
            if (!walk.chol.try_push(pool0[i])) continue;
            walk.gamma0.assign(1, pool0[i]);
            walk.consider();
            walk.walk(i + 1);
            walk.gamma0.clear();
            walk.chol.pop();
        }
    });
    if (!best.any) throw std::invalid_argument("muev: no admissible model at this order");
    return {best.value, best.witness};
}

FunctionalResult muev_sampled(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t,
                              int samples, std::uint64_t seed) {
    const int p = static_cast<int>(X.cols());
    const int n = static_cast<int>(X.rows());
    const int s = xi_star.size();
    if (t < s) throw std::invalid_argument("muev_sampled needs t >= |xi_star|");
    if (samples < 1) throw std::invalid_argument("muev_sampled needs samples >= 1");
    const int extra = std::min(t - s, p - s);
    const Eigen::MatrixXd G = normalized_gram(X);
    const std::vector<int> star0 = to_zero_based(xi_star);
    const double rel_tol = rank_tolerance_scale(n, p);

    Best best;
    if (!star0.empty()) best.offer(lambda_min_of(gram_submatrix(G, star0)), ModelIndex());

    std::vector<int> pool0 = complement_pool0(p, xi_star);
    Rng rng = make_rng(seed);
    for (int it = 0; it < samples && extra >= 1; ++it) {
        // partial Fisher-Yates: uniform subset of size `extra`
        for (int k = 0; k < extra; ++k) {
            std::uniform_int_distribution<int> pick(k, static_cast<int>(pool0.size()) - 1);
            std::swap(pool0[k], pool0[pick(rng)]);
        }
        IncrementalCholesky chol(G, rel_tol);
        std::vector<int> gamma0;
        for (int k = 0; k < extra; ++k) {
            if (chol.try_push(pool0[k])) gamma0.push_back(pool0[k]);
        }
        if (gamma0.empty()) continue;
        std::vector<int> u0;
        std::sort(gamma0.begin(), gamma0.end());
        std::merge(star0.begin(), star0.end(), gamma0.begin(), gamma0.end(),
                   std::back_inserter(u0));
        best.offer(lambda_min_of(gram_submatrix(G, u0)), to_one_based(gamma0));
    }
    if (!best.any) throw std::invalid_argument("muev_sampled: no admissible model at this order");
    return {best.value, best.witness};
}

FunctionalResult msev(const Eigen::MatrixXd& X, int t, std::uint64_t cap, int workers) {
    const int p = static_cast<int>(X.cols());
    if (t < 1) throw std::invalid_argument("msev needs t >= 1");
    const int t_eff = std::min(t, p);
    require_budget(binom_saturating(p, t_eff), cap);
    const Eigen::MatrixXd G = normalized_gram(X);

    std::vector<int> pool0(p);
    std::iota(pool0.begin(), pool0.end(), 0);

    // by eigenvalue interlacing, the minimum over |xi| <= t is attained at
    // size exactly min(t, p), so only those subsets are enumerated
    Best best = run_partitioned(workers, [&](int worker_id, Best& local) {
        scan_subsets(
            pool0, t_eff, t_eff,
            [&](const std::vector<int>& idx0) {
                local.offer(lambda_min_of(gram_submatrix(G, idx0)), to_one_based(idx0));
                return true;
            },
            workers, worker_id);
    });
    if (!best.any) throw std::invalid_argument("msev: no admissible model at this order");
    return {best.value, best.witness};
}

FunctionalResult mnev(const Eigen::MatrixXd& X, int t, std::uint64_t cap, int workers) {
    const int p = static_cast<int>(X.cols());
    const int n = static_cast<int>(X.rows());
    if (t < 1) throw std::invalid_argument("mnev needs t >= 1");
    const int t_eff = std::min(t, p);
    require_budget(subset_count_at_most(p, t_eff) - 1, cap);
    const Eigen::MatrixXd G = normalized_gram(X);

    std::vector<int> pool0(p);
    std::iota(pool0.begin(), pool0.end(), 0);

    // unlike msev, the minimum nonzero eigenvalue is not monotone along
    // subset chains, so every size up to t contributes
    Best best = run_partitioned(workers, [&](int worker_id, Best& local) {
        scan_subsets(
            pool0, 1, t_eff,
            [&](const std::vector<int>& idx0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_submatrix(G, idx0),
                                                                  Eigen::EigenvaluesOnly);
                const auto& ev = es.eigenvalues();
                int k = static_cast<int>(idx0.size());
                double tol = std::max(ev(k - 1), 0.0) * rank_tolerance_scale(n, k);
                for (int i = 0; i < k; ++i) {
                    if (ev(i) > tol) {
                        local.offer(ev(i), to_one_based(idx0));
                        break;
                    }
                }
                return true;
            },
            workers, worker_id);
    });
    if (!best.any) throw std::invalid_argument("mnev: no nonzero eigenvalue at this order");
    return {best.value, best.witness};
}

bool mnev_premise(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t, std::uint64_t cap) {
    const int p = static_cast<int>(X.cols());
    const int n = static_cast<int>(X.rows());
    if (xi_star.empty()) return true;  // no model fails to contain the empty set
    if (t < 0) throw std::invalid_argument("mnev_premise needs t >= 0");
    const int t_eff = std::min(t, p);
    require_budget(subset_count_at_most(p, t_eff), cap);

    const Eigen::MatrixXd XS = submatrix(X, xi_star);
    const double fro = XS.norm();
    const double threshold = fro * rank_tolerance_scale(n, p);

    std::vector<int> pool0(p);
    std::iota(pool0.begin(), pool0.end(), 0);

    bool ok = true;
    scan_subsets(pool0, 0, t_eff, [&](const std::vector<int>& idx0) {
        if (!ok) return false;
        ModelIndex xi = to_one_based(idx0);
        if (xi.contains_all(xi_star)) return false;  // supersets also contain xi_star
        if (idx0.empty()) return true;               // residual is X_{xi_star} itself
        Eigen::MatrixXd Q = orthonormal_basis(submatrix(X, xi));
        double resid = (XS - Q * (Q.transpose() * XS)).norm();
        if (resid <= threshold) {
            ok = false;
            return false;
        }
        return true;
    });
    return ok;
}

namespace {

double rayleigh(const Eigen::MatrixXd& G, const Eigen::VectorXd& x) {
    return x.dot(G * x) / x.squaredNorm();
}

bool cone_feasible(const Eigen::VectorXd& x, int t, double alpha) {
    const int p = static_cast<int>(x.size());
    if (t >= p) return true;
    std::vector<double> a(p);
    for (int i = 0; i < p; ++i) a[i] = std::abs(x(i));
    std::nth_element(a.begin(), a.begin() + t, a.end(), std::greater<double>());
    double top = std::accumulate(a.begin(), a.begin() + t, 0.0);
    double rest = std::accumulate(a.begin() + t, a.end(), 0.0);
    return rest <= alpha * top + 1e-12 * (top + rest);
}

//! Shrinks the off-support part of x onto the cone boundary; leaves feasible
//! vectors untouched. Feasibility is invariant to overall scale.
void project_to_cone(Eigen::VectorXd& x, int t, double alpha) {
    const int p = static_cast<int>(x.size());
    if (t >= p) return;
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(x(a)) > std::abs(x(b)); });
    double top = 0.0, rest = 0.0;
    for (int i = 0; i < p; ++i) (i < t ? top : rest) += std::abs(x(idx[i]));
    if (rest <= alpha * top || rest == 0.0) return;
    if (top == 0.0) {
        x.setZero();
        x(0) = 1.0;
        return;
    }
    double factor = alpha * top / rest * (1.0 - 1e-9);
    for (int i = t; i < p; ++i) x(idx[i]) *= factor;
}

//! Local descent of the Rayleigh quotient over the unit sphere intersected
//! with the cone; monotone, so the result only improves the start value.
double polish(const Eigen::MatrixXd& G, int t, double alpha, Eigen::VectorXd& x, int iters) {
    x.normalize();
    double q = rayleigh(G, x);
    double step = 0.1;
    for (int it = 0; it < iters && step > 1e-10; ++it) {
        Eigen::VectorXd g = G * x - q * x;
        double gn = g.norm();
        if (gn < 1e-14) break;
        Eigen::VectorXd cand = x - (step / gn) * g;
        project_to_cone(cand, t, alpha);
        double cn = cand.norm();
        if (cn < 1e-14) {
            step *= 0.5;
            continue;
        }
        cand /= cn;
        double qc = rayleigh(G, cand);
        if (qc < q - 1e-15) {
            x = cand;
            q = qc;
            step = std::min(step * 1.3, 0.5);
        } else {
            step *= 0.5;
        }
    }
    // Gradient steps zigzag and stall on the cone boundary, so finish with a
    // coordinate pattern search: robust to the boundary kinks and cheap at the
    // small dimensions this optimizer serves.
    const int p = static_cast<int>(x.size());
    double radius = 0.05;
    int evals_left = 600 * p;
    while (radius > 1e-9 && evals_left > 0) {
        bool improved = false;
        for (int j = 0; j < p && !improved; ++j) {
            for (double sgn : {1.0, -1.0}) {
                if (--evals_left <= 0) break;
                Eigen::VectorXd cand = x;
                cand(j) += sgn * radius;
                project_to_cone(cand, t, alpha);
                const double cn = cand.norm();
                if (cn < 1e-14) continue;
                cand /= cn;
                const double qc = rayleigh(G, cand);
                if (qc < q - 1e-10 * (1.0 + std::abs(q))) {
                    x = cand;
                    q = qc;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) radius *= 0.5;
    }
    return q;
}

struct MrevBest {
    double value = kInf;
    Eigen::VectorXd beta;
    void offer(double q, const Eigen::VectorXd& x) {
        if (q < value) {
            value = q;
            beta = x;
        }
    }
};

//! Keeps the lowest-quotient grid points, deduplicated by direction, so the
//! local descent can be started from every competitive basin rather than only
//! from the single best grid point (which may sit in a shallower one).
struct CandidatePool {
    static constexpr int kCap = 16;
    static constexpr double kCosThresh = 0.9;
    std::vector<std::pair<double, Eigen::VectorXd>> items;  // ascending value

    void offer(double q, const Eigen::VectorXd& x) {
        for (auto& it : items) {
            if (std::abs(it.second.dot(x)) >= kCosThresh) {
                if (q < it.first) {
                    it.first = q;
                    it.second = x;
                    resort();
                }
                return;
            }
        }
        if (static_cast<int>(items.size()) < kCap) {
            items.emplace_back(q, x);
            resort();
        } else if (q < items.back().first) {
            items.back() = {q, x};
            resort();
        }
    }

    void resort() {
        std::sort(items.begin(), items.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
};

//! Enumerates every stationary-point candidate of the quotient over the
//! feasible set. The set is a union of polyhedral cones (one per sign pattern
//! and support choice), so on the unit sphere any local minimum is an
//! eigenvector of G restricted to the span of its active constraints: some
//! zeroed coordinates plus, possibly, the piece's boundary hyperplane. At the
//! small dimensions the dense method serves, checking all of them makes the
//! reported value exact up to eigensolver precision instead of grid-limited.
void kkt_candidate_scan(const Eigen::MatrixXd& G, int t, double alpha, MrevBest& best) {
    const int p = static_cast<int>(G.rows());
    Eigen::VectorXd v(p);
    auto offer_embedded = [&](const std::vector<int>& coords, const Eigen::VectorXd& sub) {
        v.setZero();
        for (std::size_t i = 0; i < coords.size(); ++i) v(coords[i]) = sub(static_cast<int>(i));
        const double nrm = v.norm();
        if (nrm < 1e-14) return;
        v /= nrm;
        if (cone_feasible(v, t, alpha)) best.offer(rayleigh(G, v), v);
    };

    for (unsigned mask = 1; mask < (1u << p); ++mask) {
        std::vector<int> coords;
        for (int j = 0; j < p; ++j) {
            if (mask & (1u << j)) coords.push_back(j);
        }
        const int m = static_cast<int>(coords.size());
        Eigen::MatrixXd Gs(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) Gs(a, b) = G(coords[a], coords[b]);

        // walls only: eigenvectors of the principal submatrix
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gs);
        for (int k = 0; k < m; ++k) offer_embedded(coords, es.eigenvectors().col(k));

        // boundary active: needs more live coordinates than the support size,
        // at least two of them, and a nontrivial subspace after projection
        if (m <= t || m < 2) continue;
        for (unsigned smask = 0; smask < (1u << (m - 1)); ++smask) {
            Eigen::VectorXd sigma(m);
            sigma(0) = 1.0;
            for (int i = 1; i < m; ++i) sigma(i) = (smask & (1u << (i - 1))) ? -1.0 : 1.0;
            // supports of size exactly t within the live coordinates; smaller
            // supports define pieces contained in these
            for (unsigned xmask = 0; xmask < (1u << m); ++xmask) {
                if (__builtin_popcount(xmask) != t) continue;
                Eigen::VectorXd c(m);
                for (int i = 0; i < m; ++i) {
                    c(i) = (xmask & (1u << i)) ? -alpha * sigma(i) : sigma(i);
                }
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
                Eigen::MatrixXd Q = qr.householderQ();
                Eigen::MatrixXd B = Q.rightCols(m - 1);  // orthonormal basis of c-perp
                Eigen::MatrixXd M = B.transpose() * Gs * B;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pes(M);
                for (int k = 0; k < m - 1; ++k) {
                    offer_embedded(coords, B * pes.eigenvectors().col(k));
                }
            }
        }
    }
}

void dense_grid_scan(const Eigen::MatrixXd& G, int t, double alpha, double res_deg,
                     MrevBest& best, CandidatePool& pool) {
    const int p = static_cast<int>(G.rows());
    if (p == 1) {
        Eigen::VectorXd x(1);
        x(0) = 1.0;
        best.offer(G(0, 0), x);
        return;
    }
    const int m = p - 1;  // number of angles
    const double res = res_deg * M_PI / 180.0;
    // angle tables: [0, pi] inclusive except the last angle, which runs over
    // [0, pi) so that antipodal duplicates are dropped (the quotient and the
    // cone are sign-invariant)
    std::vector<std::vector<double>> cos_tab(m), sin_tab(m);
    for (int lev = 0; lev < m; ++lev) {
        int steps = static_cast<int>(std::lround(180.0 / res_deg));
        int count = (lev == m - 1) ? steps : steps + 1;
        for (int k = 0; k < count; ++k) {
            double th = k * res;
            cos_tab[lev].push_back(std::cos(th));
            sin_tab[lev].push_back(std::sin(th));
        }
    }
    Eigen::VectorXd x(p);
    std::function<void(int, double)> rec = [&](int lev, double prefix) {
        if (lev == m) {
            x(m) = prefix;
            if (!cone_feasible(x, t, alpha)) return;
            const double q = rayleigh(G, x);
            best.offer(q, x);
            // pool only near-competitive points; 0.15 comfortably exceeds the
            // worst-case grid discretization error of the quotient
            if (q < best.value + 0.15) pool.offer(q, x);
            return;
        }
        for (std::size_t k = 0; k < cos_tab[lev].size(); ++k) {
            x(lev) = prefix * cos_tab[lev][k];
            rec(lev + 1, prefix * sin_tab[lev][k]);
        }
    };
    rec(0, 1.0);
}

} // namespace

MrevEstimate mrev(const Eigen::MatrixXd& X, int t, double alpha, const std::string& method,
                  int restarts, std::uint64_t seed, const Eigen::VectorXd* seed_vector) {
    const int p = static_cast<int>(X.cols());
    if (t < 1) throw std::invalid_argument("mrev needs t >= 1");
    if (alpha < 1.0) throw std::invalid_argument("mrev needs alpha >= 1");
    std::string mode = method;
    if (mode == "auto") mode = p <= 6 ? "dense-grid" : "randomized";
    if (mode == "dense-grid" && p > 6) {
        throw std::invalid_argument("dense-grid mrev is limited to p <= 6");
    }
    if (mode != "dense-grid" && mode != "randomized") {
        throw std::invalid_argument("unknown mrev method: " + method);
    }
    const Eigen::MatrixXd G = normalized_gram(X);

    MrevBest best;
    if (seed_vector != nullptr) {
        Eigen::VectorXd v = *seed_vector;
        if (v.size() != p) throw std::invalid_argument("mrev seed vector has wrong length");
        if (v.norm() > 0 && cone_feasible(v, t, alpha)) {
            v.normalize();
            best.offer(rayleigh(G, v), v);
            Eigen::VectorXd w = v;
            best.offer(polish(G, t, alpha, w, 400), w);
        }
    }

    MrevEstimate out;
    if (mode == "dense-grid") {
        // the stationary-point enumeration below supplies exactness, so the
        // grid can stay coarse enough to keep p = 6 scans fast
        double res_deg = p <= 4 ? 2.0 : (p == 5 ? 6.0 : 10.0);
        CandidatePool pool;
        dense_grid_scan(G, t, alpha, res_deg, best, pool);
        for (const auto& [q, cand] : pool.items) {
            Eigen::VectorXd w = cand;
            best.offer(polish(G, t, alpha, w, 400), w);
        }
        kkt_candidate_scan(G, t, alpha, best);
        out.method = "dense-grid";
        out.grid_resolution_deg = res_deg;
    } else {
        Rng rng = make_rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int r = 0; r < restarts; ++r) {
            Eigen::VectorXd z(p);
            for (int i = 0; i < p; ++i) z(i) = normal(rng);
            project_to_cone(z, t, alpha);
            if (z.norm() < 1e-14) continue;
            best.offer(polish(G, t, alpha, z, 400), z);
        }
        out.method = "randomized";
    }
    if (!std::isfinite(best.value)) {
        throw std::logic_error("mrev found no feasible point");
    }
    out.value = std::max(0.0, best.value);
    out.beta = best.beta;
    return out;
}

SchurCheck schur_bound_check(const Eigen::MatrixXd& S, const ModelIndex& block1) {
    const int d = static_cast<int>(S.rows());
    if (S.cols() != d) throw std::invalid_argument("schur_bound_check needs a square matrix");
    if (block1.empty() || block1.max_member() > d || block1.size() >= d) {
        throw std::invalid_argument("block split must be a nonempty proper subset of 1..dim");
    }
    std::vector<int> i1 = to_zero_based(block1);
    std::vector<int> i2;
    for (int j = 0; j < d; ++j) {
        if (!block1.contains(j + 1)) i2.push_back(j);
    }
    const int q = static_cast<int>(i1.size());
    const int r = static_cast<int>(i2.size());
    Eigen::MatrixXd S11(q, q), S12(q, r), S22(r, r);
    for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) S11(a, b) = S(i1[a], i1[b]);
        for (int b = 0; b < r; ++b) S12(a, b) = S(i1[a], i2[b]);
    }
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) S22(a, b) = S(i2[a], i2[b]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S11);
    if (!lu.isInvertible()) {
        throw RankDeficiencyError("schur_bound_check: singular leading block",
                                  static_cast<int>(lu.rank()), q);
    }
    Eigen::MatrixXd schur = S22 - S12.transpose() * lu.solve(S12);
    schur = 0.5 * (schur + schur.transpose().eval());

    SchurCheck out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(schur, Eigen::EigenvaluesOnly);
    out.lhs = es1.eigenvalues()(0);
    Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sym, Eigen::EigenvaluesOnly);
    out.rhs = es2.eigenvalues()(0);
    out.holds = out.lhs >= out.rhs - 1e-9;
    return out;
}

EigenReport audit_eigen(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t, double alpha,
                        std::uint64_t cap, int workers, int restarts, std::uint64_t seed) {
    EigenReport rep;
    rep.t = t;
    rep.alpha = alpha;
    rep.muev = muev(X, xi_star, t, cap, workers);
    rep.msev = msev(X, t, cap, workers);
    rep.mnev = mnev(X, t, cap, workers);
    rep.mnev_premise_holds = mnev_premise(X, xi_star, t, cap);

    // anchor the restricted-eigenvalue search at the sparse minimizer so the
    // reported estimate never exceeds msev
    const Eigen::MatrixXd G = normalized_gram(X);
    std::vector<int> w0 = to_zero_based(rep.msev.witness);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_submatrix(G, w0));
    Eigen::VectorXd anchor = Eigen::VectorXd::Zero(X.cols());
    for (std::size_t i = 0; i < w0.size(); ++i) anchor(w0[i]) = es.eigenvectors().col(0)(i);
    rep.mrev = mrev(X, t, alpha, "auto", restarts, seed, &anchor);
    return rep;
}

} // namespace ssreg
