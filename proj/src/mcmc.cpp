#include "ssreg/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "ssreg/errors.hpp"
#include "ssreg/evidence.hpp"
#include "ssreg/linalg.hpp"
#include "ssreg/rng.hpp"
#include "ssreg/subset_scan.hpp"

namespace ssreg {

void SamplerConfig::validate() const {
    if (sweeps < 1) throw std::invalid_argument("sampler needs sweeps >= 1");
    if (burn_in < 0 || burn_in >= sweeps) throw std::invalid_argument("sampler needs 0 <= burn_in < sweeps");
    if (thin < 1) throw std::invalid_argument("sampler needs thin >= 1");
    if (w_add < 0.0 || w_delete < 0.0 || w_swap < 0.0 ||
        std::abs(w_add + w_delete + w_swap - 1.0) > 1e-6) {
        throw std::invalid_argument("move weights must be nonnegative and sum to 1");
    }
    if (screen_size < 0) throw std::invalid_argument("screen_size must be >= 0");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_or_neg_inf(double w) { return w > 0.0 ? std::log(w) : kNegInf; }

double draw_exponential(Rng& rng, double rate) { return -std::log(canonical(rng)) / rate; }

//! Inverse-gaussian draw (mean mu, shape lam) by the transformation method of
//! Michael, Schucany and Haas.
double draw_inverse_gaussian(Rng& rng, double mu, double lam) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double nu = gauss(rng);
    double y = nu * nu;
    double x = mu + mu * mu * y / (2.0 * lam) -
               mu / (2.0 * lam) * std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
    if (!(x > 0.0)) x = mu * 1e-12;  // guard against cancellation at extreme y
    double u = canonical(rng);
    return u <= mu / (mu + x) ? x : mu * mu / x;
}

//! sigma^2 | rest is inverse-gamma(a + n/2, b + quad/2), truncated when the
//! variance prior is; truncated draws invert the gamma CDF.
double draw_sigma2(Rng& rng, const VariancePrior& vp, int n, double quad) {
    const double shape = vp.a + 0.5 * n;
    const double rate = vp.b + 0.5 * quad;
    if (!vp.is_truncated()) {
        std::gamma_distribution<double> gamma(shape, 1.0);
        double g = gamma(rng);
        if (!(g > 0.0)) g = 1e-300;
        return rate / g;
    }
    // sigma^2 in [lo, hi] maps to g = rate / sigma^2 in [rate/hi, rate/lo]
    double u_hi = vp.lo > 0.0 ? boost::math::gamma_p(shape, rate / vp.lo) : 1.0;
    double u_lo = boost::math::gamma_p(shape, rate / vp.hi);
    double v = u_lo + canonical(rng) * (u_hi - u_lo);
    v = std::min(std::max(v, 1e-300), 1.0 - 1e-16);
    double g = boost::math::gamma_p_inv(shape, v);
    double s2 = rate / g;
    return std::min(std::max(s2, vp.lo), vp.hi);
}

struct Workspace {
    const ProblemInstance& instance;
    const PriorSpec& prior;
    Eigen::MatrixXd gram;  // X'X
    Eigen::VectorXd xty;
    double yty;
    bool dense;  // continuous spike: collapse runs over all p coordinates
    double rank_tol;

    Workspace(const ProblemInstance& inst, const PriorSpec& pr)
        : instance(inst), prior(pr) {
        gram = inst.X.transpose() * inst.X;
        xty = inst.X.transpose() * inst.Y;
        yty = inst.Y.squaredNorm();
        dense = !pr.spike.is_dirac();
        rank_tol = rank_tolerance_scale(inst.n, inst.p);
        if (dense && inst.p > 64) {
            throw std::invalid_argument(
                "a continuous spike makes every sweep dense in p; use p <= 64 or a dirac spike");
        }
    }

    bool full_rank(const ModelIndex& xi) const {
        IncrementalCholesky chol(gram, rank_tol);
        for (int j : xi.members()) {
            if (!chol.try_push(j - 1)) return false;
        }
        return true;
    }

    //! Collapse for a model given the mixture variances; omega holds the
    //! z-scale variance per coordinate (only the entries the configuration
    //! actually uses are read).
    CollapsedGaussian collapse(const ModelIndex& xi, const Eigen::VectorXd& omega) const {
        const int p = instance.p;
        if (!dense) {
            const int k = xi.size();
            Eigen::MatrixXd gs(k, k);
            Eigen::VectorXd c(k);
            std::vector<double> d(k);
            const auto& mem = xi.members();
            for (int r = 0; r < k; ++r) {
                c(r) = xty(mem[r] - 1);
                d[r] = variance_of(mem[r], xi, omega);
                for (int q = 0; q < k; ++q) gs(r, q) = gram(mem[r] - 1, mem[q] - 1);
            }
            return collapse_gaussian(gs, c, yty, d);
        }
        std::vector<double> d(p);
        for (int j = 1; j <= p; ++j) d[j - 1] = variance_of(j, xi, omega);
        return collapse_gaussian(gram, xty, yty, d);
    }

    //! Prior z-variance of coordinate j under model xi (slab inside, spike
    //! outside), dereferencing the scale mixture for laplace components.
    double variance_of(int j, const ModelIndex& xi, const Eigen::VectorXd& omega) const {
        if (xi.contains(j)) {
            return prior.slab.kind == SlabDist::Kind::Gaussian ? prior.slab.scale * prior.slab.scale
                                                               : omega(j - 1);
        }
        switch (prior.spike.kind) {
            case SpikeDist::Kind::Dirac:
                throw std::logic_error("dirac spike coordinates carry no variance");
            case SpikeDist::Kind::Gaussian:
                return prior.spike.scale * prior.spike.scale;
            case SpikeDist::Kind::Laplace:
                return omega(j - 1);
        }
        return 0.0;
    }

    bool coordinate_uses_mixture(int j, const ModelIndex& xi) const {
        if (xi.contains(j)) return prior.slab.kind == SlabDist::Kind::Laplace;
        return prior.spike.kind == SpikeDist::Kind::Laplace;
    }

    double mixture_rate(int j, const ModelIndex& xi) const {
        double rho = xi.contains(j) ? prior.slab.scale : prior.spike.scale;
        return 0.5 * rho * rho;  // omega ~ exponential(rho^2 / 2) gives var(z) = 2/rho^2
    }
};

//! Draws the coefficient vector given (xi, omega, sigma2) from the exact
//! gaussian conditional; off-model coordinates are zero under a dirac spike.
Eigen::VectorXd draw_beta(Rng& rng, const Workspace& ws, const ModelIndex& xi,
                          const CollapsedGaussian& cg, double sigma2) {
    const int p = ws.instance.p;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    const int k = static_cast<int>(cg.mean.size());
    if (k == 0) return beta;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i) g(i) = gauss(rng);
    Eigen::VectorXd dev =
        cg.chol_A.transpose().triangularView<Eigen::Upper>().solve(g) * std::sqrt(sigma2);
    Eigen::VectorXd bsel = cg.mean + dev;
    if (ws.dense) {
        beta = bsel;
    } else {
        const auto& mem = xi.members();
        for (int i = 0; i < k; ++i) beta(mem[i] - 1) = bsel(i);
    }
    return beta;
}

ModelIndex screen_initial_model(const Workspace& ws, int screen_size) {
    const int p = ws.instance.p;
    const int n = ws.instance.n;
    int m = screen_size > 0 ? screen_size
                            : std::max(5, static_cast<int>(std::lround(std::sqrt(double(n)))));
    m = std::min(m, std::min(p, n));
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double sa = std::abs(ws.xty(a)), sb = std::abs(ws.xty(b));
        if (sa != sb) return sa > sb;
        return a < b;
    });
    IncrementalCholesky chol(ws.gram, ws.rank_tol);
    std::vector<int> members;
    for (int i = 0; i < p && static_cast<int>(members.size()) < m; ++i) {
        if (chol.try_push(order[i])) members.push_back(order[i] + 1);
    }
    return ModelIndex(members);
}

} // namespace

ChainResult mcmc_sample(const ProblemInstance& instance, const PriorSpec& prior,
                        const SamplerConfig& config) {
    config.validate();
    Workspace ws(instance, prior);
    Rng rng = make_rng(config.seed);
    const int p = instance.p;
    const int n = instance.n;

    ModelIndex xi;
    switch (config.init) {
        case SamplerConfig::Init::Empty:
            break;
        case SamplerConfig::Init::Truth: {
            if (!instance.truth) throw std::invalid_argument("truth init needs ground truth");
            IncrementalCholesky chol(ws.gram, ws.rank_tol);
            std::vector<int> members;
            for (int j : instance.truth->xi_star.members()) {
                if (chol.try_push(j - 1)) members.push_back(j);
            }
            xi = ModelIndex(members);
            break;
        }
        case SamplerConfig::Init::Screen:
            xi = screen_initial_model(ws, config.screen_size);
            break;
    }

    // scale-mixture variances for laplace components, refreshed by Gibbs
    Eigen::VectorXd omega = Eigen::VectorXd::Zero(p);
    bool any_mixture = prior.slab.kind == SlabDist::Kind::Laplace ||
                       prior.spike.kind == SpikeDist::Kind::Laplace;
    for (int j = 1; j <= p; ++j) {
        if ((ws.dense || xi.contains(j)) && ws.coordinate_uses_mixture(j, xi)) {
            omega(j - 1) = draw_exponential(rng, ws.mixture_rate(j, xi));
        }
    }

    double sigma2 = std::max(ws.yty / n, 1e-12);
    if (prior.variance.is_truncated()) {
        sigma2 = std::min(std::max(sigma2, prior.variance.lo * 1.0000001), prior.variance.hi);
    }

    CollapsedGaussian cur = ws.collapse(xi, omega);
    double cur_loglik = collapsed_loglik_given_sigma2(cur, n, sigma2);
    double cur_logprior = prior.selection.log_mass(xi);

    ChainResult out;
    out.init_model = xi;
    out.burn_in = config.burn_in;
    out.size_series.reserve(config.sweeps);
    long prop[3] = {0, 0, 0}, acc[3] = {0, 0, 0};
    const double lw[3] = {log_or_neg_inf(config.w_add), log_or_neg_inf(config.w_delete),
                          log_or_neg_inf(config.w_swap)};

    for (int sweep = 0; sweep < config.sweeps; ++sweep) {
        // --- MH move on the model, coefficients marginalized ---
        double u = canonical(rng);
        int move = u < config.w_add ? 0 : (u < config.w_add + config.w_delete ? 1 : 2);
        int k = xi.size();
        bool movable = !((move == 0 && k == p) || (move != 0 && k == 0) || (move == 2 && k == p));
        if (movable) {
            prop[move]++;
            ModelIndex cand;
            double log_q_fwd = 0.0, log_q_rev = 0.0;
            if (move == 0) {
                int pick = static_cast<int>(canonical(rng) * (p - k));
                int j = 0, seen = 0;
                for (int c = 1; c <= p; ++c) {
                    if (!xi.contains(c) && seen++ == pick) {
                        j = c;
                        break;
                    }
                }
                cand = xi.with(j);
                log_q_fwd = lw[0] - std::log(double(p - k));
                log_q_rev = lw[1] - std::log(double(k + 1));
            } else if (move == 1) {
                int j = xi.members()[static_cast<int>(canonical(rng) * k)];
                cand = xi.without(j);
                log_q_fwd = lw[1] - std::log(double(k));
                log_q_rev = lw[0] - std::log(double(p - k + 1));
            } else {
                int j = xi.members()[static_cast<int>(canonical(rng) * k)];
                int pick = static_cast<int>(canonical(rng) * (p - k));
                int l = 0, seen = 0;
                for (int c = 1; c <= p; ++c) {
                    if (!xi.contains(c) && seen++ == pick) {
                        l = c;
                        break;
                    }
                }
                cand = xi.without(j).with(l);
                // symmetric: swap counts match in both directions
            }
            if (ws.full_rank(cand)) {
                // fresh mixture variances for coordinates whose component
                // changes; proposal-from-prior densities cancel in the ratio
                Eigen::VectorXd omega_cand = omega;
                for (int j = 1; j <= p; ++j) {
                    bool was_in = xi.contains(j), is_in = cand.contains(j);
                    if (was_in == is_in) continue;
                    if ((ws.dense || is_in) && ws.coordinate_uses_mixture(j, cand)) {
                        omega_cand(j - 1) = draw_exponential(rng, ws.mixture_rate(j, cand));
                    }
                }
                CollapsedGaussian cg_cand = ws.collapse(cand, omega_cand);
                double cand_loglik = collapsed_loglik_given_sigma2(cg_cand, n, sigma2);
                double cand_logprior = prior.selection.log_mass(cand);
                double log_r =
                    cand_loglik + cand_logprior - cur_loglik - cur_logprior + log_q_rev - log_q_fwd;
                if (std::log(canonical(rng)) < log_r) {
                    xi = cand;
                    omega = omega_cand;
                    cur = std::move(cg_cand);
                    cur_loglik = cand_loglik;
                    cur_logprior = cand_logprior;
                    acc[move]++;
                }
            }
        }

        // --- Gibbs on sigma^2 ---
        sigma2 = draw_sigma2(rng, prior.variance, n, cur.quad);
        cur_loglik = collapsed_loglik_given_sigma2(cur, n, sigma2);

        // --- coefficient and scale-mixture refresh ---
        bool keep = sweep >= config.burn_in && (sweep - config.burn_in) % config.thin == 0;
        if (any_mixture || keep) {
            Eigen::VectorXd beta = draw_beta(rng, ws, xi, cur, sigma2);
            if (any_mixture) {
                double sigma = std::sqrt(sigma2);
                for (int j = 1; j <= p; ++j) {
                    if (!(ws.dense || xi.contains(j)) || !ws.coordinate_uses_mixture(j, xi)) continue;
                    double z = std::max(std::abs(beta(j - 1)) / sigma, 1e-12);
                    double rho = xi.contains(j) ? prior.slab.scale : prior.spike.scale;
                    double inv_omega = draw_inverse_gaussian(rng, rho / z, rho * rho);
                    omega(j - 1) = std::min(std::max(1.0 / inv_omega, 1e-12), 1e12);
                }
                cur = ws.collapse(xi, omega);
                cur_loglik = collapsed_loglik_given_sigma2(cur, n, sigma2);
            }
            if (keep) out.states.push_back({xi, sigma2, std::move(beta)});
        }
        out.size_series.push_back(xi.size());
    }

    out.accept_rate_add = prop[0] > 0 ? double(acc[0]) / prop[0] : 0.0;
    out.accept_rate_delete = prop[1] > 0 ? double(acc[1]) / prop[1] : 0.0;
    out.accept_rate_swap = prop[2] > 0 ? double(acc[2]) / prop[2] : 0.0;
    return out;
}

std::unordered_map<ModelIndex, double, ModelIndexHash> model_frequencies(
    const std::vector<ChainState>& states) {
    std::unordered_map<ModelIndex, double, ModelIndexHash> freq;
    if (states.empty()) return freq;
    const double w = 1.0 / static_cast<double>(states.size());
    for (const ChainState& st : states) freq[st.xi] += w;
    return freq;
}

double effective_sample_size(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 4) return static_cast<double>(n);
    double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = series[i] - mean;
    double c0 = 0.0;
    for (int i = 0; i < n; ++i) c0 += x[i] * x[i];
    c0 /= n;
    if (c0 <= 0.0) return static_cast<double>(n);  // constant series mixes trivially

    auto acov = [&](int lag) {
        double c = 0.0;
        for (int i = 0; i + lag < n; ++i) c += x[i] * x[i + lag];
        return c / n;
    };
    // initial positive sequence: sum paired autocovariances while positive
    double tau = c0;  // becomes c0 * integrated autocorrelation time
    for (int m = 0;; ++m) {
        int l1 = 2 * m + 1, l2 = 2 * m + 2;
        if (l2 >= n) break;
        double pair = acov(l1) + acov(l2);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    return std::max(1.0, n * c0 / tau);
}

} // namespace ssreg
