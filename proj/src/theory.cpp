#include "ssreg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ssreg/linalg.hpp"
#include "ssreg/rng.hpp"
#include "ssreg/subset_scan.hpp"

namespace ssreg {

namespace {

std::string fmt(const char* pattern, ...) {
    char buf[256];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

double chi2_upper_tail(double d, double x) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * d, 0.5 * x);
}

double chi2_lower_tail(double d, double x) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * d, 0.5 * x);
}

double log_choose(int m, int k) {
    if (k < 0 || k > m) return -std::numeric_limits<double>::infinity();
    return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

} // namespace

BoundComparison chi2_tail_bound(int d, double t) {
    if (d < 1) throw std::invalid_argument("chi2_tail_bound needs d >= 1");
    if (2.0 * t < d) throw std::invalid_argument("chi2_tail_bound needs 2t >= d");
    BoundComparison out;
    const double root = std::sqrt(2.0 * t - d) - std::sqrt(static_cast<double>(d));
    out.bound_value = std::exp(-root * root / 4.0);
    out.exact_or_mc_value = chi2_upper_tail(d, t);
    out.holds = out.exact_or_mc_value <= out.bound_value + 1e-12;
    out.context = fmt("d=%d t=%.10g", d, t);
    return out;
}

std::pair<BoundComparison, BoundComparison> chi2_norm_bounds(int n, int d, double eps) {
    if (n <= d || d < 0) throw std::invalid_argument("chi2_norm_bounds needs n > d >= 0");
    if (n * eps <= d) throw std::invalid_argument("chi2_norm_bounds needs n*eps > d");
    const double df = n - d;
    const std::string ctx = fmt("n=%d d=%d eps=%.10g", n, d, eps);

    BoundComparison upper;
    const double up = n * eps + d;
    upper.bound_value = std::exp(-std::min(up * up / (8.0 * df), up / 8.0));
    upper.exact_or_mc_value = chi2_upper_tail(df, n * (1.0 + eps));
    upper.holds = upper.exact_or_mc_value <= upper.bound_value + 1e-12;
    upper.context = ctx + " side=upper";

    BoundComparison lower;
    const double lo = n * eps - d;
    lower.bound_value = std::exp(-std::min(lo * lo / (8.0 * df), lo / 8.0));
    lower.exact_or_mc_value = chi2_lower_tail(df, n * (1.0 - eps));
    lower.holds = lower.exact_or_mc_value <= lower.bound_value + 1e-12;
    lower.context = ctx + " side=lower";

    return {upper, lower};
}

BoundComparison pelekis_bound(int p, double mu, int t) {
    if (p < 1 || mu <= 0.0 || mu >= 1.0) {
        throw std::invalid_argument("pelekis_bound needs p >= 1 and mu in (0,1)");
    }
    if (!(p * mu < t) || t > p - 1) {
        throw std::invalid_argument("pelekis_bound needs p*mu < t <= p-1");
    }
    const int tt = static_cast<int>(std::floor((t - p * mu) / (1.0 - mu)));
    BoundComparison out;
    out.bound_value = std::exp(2.0 * (tt + 1) * std::log(mu) - std::log(2.0) +
                               log_choose(p, tt + 1) - log_choose(t, tt + 1));
    boost::math::binomial_distribution<double> bin(p, mu);
    out.exact_or_mc_value = boost::math::cdf(boost::math::complement(bin, t - 1));
    out.holds = out.exact_or_mc_value <= out.bound_value + 1e-12;
    out.context = fmt("p=%d mu=%.10g t=%d ttilde=%d", p, mu, t, tt);
    return out;
}

namespace {

//! Squared norm of the projection of Y onto the column span of Xsub.
double projected_sq(const Eigen::MatrixXd& Xsub, const Eigen::VectorXd& Y) {
    if (Xsub.cols() == 0) return 0.0;
    Eigen::MatrixXd B = orthonormal_basis(Xsub);
    return (B.transpose() * Y).squaredNorm();
}

Eigen::MatrixXd columns_of(const Eigen::MatrixXd& X, const std::vector<int>& cols0) {
    Eigen::MatrixXd out(X.rows(), static_cast<int>(cols0.size()));
    for (int i = 0; i < static_cast<int>(cols0.size()); ++i) out.col(i) = X.col(cols0[i]);
    return out;
}

ModelIndex to_model(const std::vector<int>& cols0) {
    std::vector<int> m;
    m.reserve(cols0.size());
    for (int j : cols0) m.push_back(j + 1);
    return ModelIndex(std::move(m));
}

//! Depth-first scan over full-rank subsets gamma of the complement of
//! xi_star, evaluating the three test statistics at each visit. Mirrors the
//! eigenvalue walks: a failed Cholesky pivot prunes every superset.
struct PhiWalk {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& Y;
    const std::vector<int>& pool0;  // complement of xi_star, 0-based
    const std::vector<int>& star0;  // xi_star, 0-based sorted
    int max_extra;
    double yty;
    double n_sig2;  // n * sigma_star^2
    IncrementalCholesky chol;
    std::vector<int> gamma0;
    PhiReport* report;

    PhiWalk(const Eigen::MatrixXd& X_, const Eigen::VectorXd& Y_, const std::vector<int>& pool_,
            const std::vector<int>& star_, int max_extra_, double sigma_star,
            const Eigen::MatrixXd& gram, double rel_tol, PhiReport* report_)
        : X(X_), Y(Y_), pool0(pool_), star0(star_), max_extra(max_extra_),
          yty(Y_.squaredNorm()), n_sig2(X_.rows() * sigma_star * sigma_star),
          chol(gram, rel_tol), report(report_) {}

    void run() {
        consider();
        recurse(0);
    }

    void recurse(int from) {
        if (static_cast<int>(gamma0.size()) >= max_extra) return;
        for (int i = from; i < static_cast<int>(pool0.size()); ++i) {
            if (!chol.try_push(pool0[i])) continue;
            gamma0.push_back(pool0[i]);
            consider();
            recurse(i + 1);
            gamma0.pop_back();
            chol.pop();
        }
    }

    void consider() {
        ++report->unions_scanned;
        std::vector<int> u0(star0.size() + gamma0.size());
        std::merge(star0.begin(), star0.end(), gamma0.begin(), gamma0.end(), u0.begin());

        Eigen::MatrixXd Xu = columns_of(X, u0);
        const double pu = projected_sq(Xu, Y);

        const double stat1 = std::abs((yty - pu) / n_sig2 - 1.0);
        if (stat1 > report->phi1.statistic || report->unions_scanned == 1) {
            report->phi1.statistic = stat1;
            report->phi1.witness = to_model(gamma0);
        }

        double diff2 = 0.0;
        if (!u0.empty()) {  // an empty union (empty truth, empty gamma) fits nothing
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xu, Eigen::ComputeThinU | Eigen::ComputeThinV);
            Eigen::VectorXd b = svd.solve(Y);
            const GroundTruth& truth = *report_truth;
            for (int i = 0; i < static_cast<int>(u0.size()); ++i) {
                const double d = b(i) - truth.beta_star(u0[i]);
                diff2 += d * d;
            }
        }
        const double stat2 = std::sqrt(diff2);
        if (stat2 > report->phi2.statistic || report->unions_scanned == 1) {
            report->phi2.statistic = stat2;
            report->phi2.witness = to_model(gamma0);
        }

        // phi3 ranges over xi = delta u gamma with delta a proper subset of
        // xi_star; xi u xi_star = gamma u xi_star regardless of delta.
        const int s = static_cast<int>(star0.size());
        if (s == 0) return;
        for (unsigned mask = 0; mask + 1 < (1u << s); ++mask) {
            int pushed = 0;
            bool ok = true;
            for (int i = 0; i < s && ok; ++i) {
                if (!(mask & (1u << i))) continue;
                if (chol.try_push(star0[i])) {
                    ++pushed;
                } else {
                    ok = false;
                }
            }
            if (ok) {
                std::vector<int> xi0 = gamma0;
                for (int i = 0; i < s; ++i) {
                    if (mask & (1u << i)) xi0.push_back(star0[i]);
                }
                std::sort(xi0.begin(), xi0.end());
                const double pxi = projected_sq(columns_of(X, xi0), Y);
                const double stat3 = std::sqrt(std::max(0.0, pu - pxi));
                if (stat3 < report->phi3.statistic) {
                    report->phi3.statistic = stat3;
                    report->phi3.witness = to_model(xi0);
                }
            }
            for (int i = 0; i < pushed; ++i) chol.pop();
        }
    }

    const GroundTruth* report_truth = nullptr;
};

} // namespace

PhiReport phi_statistics(const ProblemInstance& instance, const RegularityConstants& consts,
                         double z0n, double lambda, std::uint64_t cap) {
    if (!instance.truth) throw std::invalid_argument("phi_statistics needs ground truth");
    if (!(lambda > 0.0)) throw std::invalid_argument("phi_statistics needs lambda > 0");
    const GroundTruth& truth = instance.truth.value();
    const int n = instance.n;
    const int p = instance.p;
    const int s = truth.xi_star.size();
    const int max_extra = static_cast<int>(std::floor(consts.K * std::max(1, s)));

    std::uint64_t budget = subset_count_at_most(p - s, max_extra);
    for (int i = 0; i < s; ++i) {
        budget = budget > std::numeric_limits<std::uint64_t>::max() / 2
                     ? std::numeric_limits<std::uint64_t>::max()
                     : 2 * budget;
    }
    require_budget(budget, cap);

    PhiReport report;
    report.eps_n = epsilon_n(n, p, std::max(1, s));
    report.z0n = z0n;
    report.phi1.threshold = consts.M1 * report.eps_n;
    report.phi2.threshold =
        consts.M2 * truth.sigma_star * report.eps_n / (2.0 * std::sqrt(lambda));
    report.phi3.threshold = consts.M3 * truth.sigma_star * std::sqrt(n) * report.eps_n / 2.0;
    report.phi3.statistic = std::numeric_limits<double>::infinity();

    std::vector<int> star0;
    std::vector<int> pool0;
    for (int j = 1; j <= p; ++j) {
        if (truth.xi_star.contains(j)) {
            star0.push_back(j - 1);
        } else {
            pool0.push_back(j - 1);
        }
    }

    const Eigen::MatrixXd gram = instance.X.transpose() * instance.X;
    PhiWalk walk(instance.X, instance.Y, pool0, star0, max_extra, truth.sigma_star, gram,
                 rank_tolerance_scale(n, p), &report);
    walk.report_truth = &truth;
    walk.run();

    report.phi1.triggered = report.phi1.statistic > report.phi1.threshold;
    report.phi2.triggered = report.phi2.statistic > report.phi2.threshold;
    report.phi3.triggered = report.phi3.statistic < report.phi3.threshold;
    return report;
}

SelectionRateReport selection_rate(const PriorSpec& prior, int n, int p, int s, double lambda,
                                   double eta, double K, bool per_model) {
    if (!(lambda > 0.0)) throw std::invalid_argument("selection_rate needs lambda > 0");
    if (n < 1 || p < 1 || s < 0 || s > p) {
        throw std::invalid_argument("selection_rate needs 1 <= n, 0 <= s <= p");
    }
    SelectionRateReport out;
    out.slab_factor =
        prior.slab.sup_density() * std::pow(p, 1.0 + eta) / std::sqrt(n * lambda);

    const double log_pi_true = prior.selection.log_mass_of_size(s);
    const int jmax = static_cast<int>(std::floor(K * s));
    double max_factor = 0.0;
    for (int j = 1; j <= jmax; ++j) {
        double factor = 0.0;
        if (s + j <= p) {
            const double log_num = per_model ? prior.selection.log_mass_of_size(s + j)
                                             : prior.selection.log_size_marginal(s + j);
            factor = std::exp((log_num - log_pi_true) / j);
        }
        out.size_factors.push_back(factor);
        max_factor = std::max(max_factor, factor);
    }
    out.r_n = max_factor * out.slab_factor;
    out.passes = out.r_n < 1.0;
    return out;
}

double posterior_ratio_bound(int t_minus_s, int n, int p, double lambda, double eta,
                             double sup_h1) {
    if (t_minus_s < 0 || n < 1 || p < 1 || !(lambda > 0.0) || !(sup_h1 > 0.0) || eta < 0.0) {
        throw std::invalid_argument("posterior_ratio_bound needs positive inputs");
    }
    const double base = std::sqrt(2.0 * M_PI / (n * lambda)) * sup_h1 * std::pow(p, 1.0 + eta);
    return 2.0 * std::pow(base, t_minus_s);
}

BoundComparison omega_event_frequency(const Eigen::MatrixXd& X, const ModelIndex& xi_star,
                                      double K, double eta, int draws, std::uint64_t seed,
                                      std::uint64_t cap) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int s = xi_star.size();
    if (draws < 1) throw std::invalid_argument("omega_event_frequency needs draws >= 1");
    if (s < 1 || xi_star.max_member() > p) {
        throw std::invalid_argument("omega_event_frequency needs a nonempty xi_star within p");
    }
    const int max_extra = std::max(0, static_cast<int>(std::floor((K + 1.0) * s)) - s);
    require_budget(subset_count_at_most(p - s, max_extra), cap);
    const double logp = std::log(static_cast<double>(p));

    // basis of the extra directions (P_xi - P_xi_star) for each superset
    Eigen::MatrixXd Xstar = submatrix(X, xi_star);
    Eigen::MatrixXd Qstar = orthonormal_basis(Xstar);
    std::vector<std::pair<Eigen::MatrixXd, double>> events;  // (basis, threshold)

    const Eigen::MatrixXd gram = X.transpose() * X;
    IncrementalCholesky chol(gram, rank_tolerance_scale(n, p));
    bool star_ok = true;
    for (int j : xi_star.members()) {
        if (!chol.try_push(j - 1)) star_ok = false;
    }
    if (!star_ok) throw std::invalid_argument("omega_event_frequency needs full-rank xi_star");

    std::vector<int> pool0;
    for (int j = 1; j <= p; ++j) {
        if (!xi_star.contains(j)) pool0.push_back(j - 1);
    }
    std::vector<int> gamma0;
    const std::function<void(int)> recurse = [&](int from) {
        if (static_cast<int>(gamma0.size()) >= max_extra) return;
        for (int i = from; i < static_cast<int>(pool0.size()); ++i) {
            if (!chol.try_push(pool0[i])) continue;
            gamma0.push_back(pool0[i]);
            Eigen::MatrixXd Xg = columns_of(X, gamma0);
            Eigen::MatrixXd R = Xg - Qstar * (Qstar.transpose() * Xg);
            const double extra = static_cast<double>(gamma0.size());
            events.emplace_back(orthonormal_basis(R).transpose(),
                                (2.0 + eta) * extra * logp);
            recurse(i + 1);
            gamma0.pop_back();
            chol.pop();
        }
    };
    recurse(0);

    // Monte-Carlo pass over noise draws
    const double r2max = 4.0 * n;
    std::int64_t hits = 0;
    for (int d = 0; d < draws; ++d) {
        Rng rng = make_rng(derive_seed(seed, 0x03E6, static_cast<std::uint64_t>(d)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd epsv(n);
        for (int i = 0; i < n; ++i) epsv(i) = gauss(rng);
        bool bad = epsv.squaredNorm() >= r2max;
        for (std::size_t e = 0; e < events.size() && !bad; ++e) {
            bad = (events[e].first * epsv).squaredNorm() >= events[e].second;
        }
        hits += bad;
    }
    const double freq = static_cast<double>(hits) / draws;

    double bound = chi2_upper_tail(n, 4.0 * n);
    for (int extra = 1; extra <= max_extra; ++extra) {
        bound += std::pow(static_cast<double>(p), extra) *
                 chi2_upper_tail(extra, (2.0 + eta) * extra * logp);
    }

    BoundComparison out;
    out.bound_value = bound;
    out.exact_or_mc_value = freq;
    const double se = std::sqrt(std::max(freq * (1.0 - freq), 1.0 / draws) / draws);
    out.holds = freq <= bound + 3.0 * se;
    out.context = fmt("n=%d p=%d s=%d K=%.10g eta=%.10g draws=%d supersets=%zu", n, p, s, K,
                      eta, draws, events.size());
    return out;
}

} // namespace ssreg
