#include "ssreg/evidence.hpp"

#include <cmath>
#include <stdexcept>

#include "ssreg/errors.hpp"
#include "ssreg/linalg.hpp"

namespace ssreg {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

} // namespace

CollapsedGaussian collapse_gaussian(const Eigen::MatrixXd& gram_sel, const Eigen::VectorXd& c,
                                    double yty, const std::vector<double>& d) {
    const int k = static_cast<int>(gram_sel.rows());
    if (gram_sel.cols() != k || c.size() != k || static_cast<int>(d.size()) != k) {
        throw std::invalid_argument("collapse_gaussian: inconsistent dimensions");
    }
    CollapsedGaussian cg;
    if (k == 0) {
        cg.quad = yty;
        cg.mean.resize(0);
        cg.chol_A.resize(0, 0);
        return cg;
    }
    Eigen::MatrixXd A = gram_sel;
    double logdet_D = 0.0;
    for (int i = 0; i < k; ++i) {
        if (!(d[i] > 0.0)) throw std::invalid_argument("collapse_gaussian: prior variances must be positive");
        A(i, i) += 1.0 / d[i];
        logdet_D += std::log(d[i]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("collapse_gaussian: Cholesky factorization failed");
    }
    cg.chol_A = llt.matrixL();
    double logdet_A = 0.0;
    for (int i = 0; i < k; ++i) logdet_A += 2.0 * std::log(cg.chol_A(i, i));
    // |M| = |I + X D X'| = |D| |X'X + D^{-1}| by the Weinstein-Aronszajn identity
    cg.logdet_M = logdet_D + logdet_A;
    cg.mean = llt.solve(c);
    cg.quad = std::max(0.0, yty - c.dot(cg.mean));
    return cg;
}

double collapsed_loglik_given_sigma2(const CollapsedGaussian& cg, int n, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    return -0.5 * n * (kLog2Pi + std::log(sigma2)) - 0.5 * cg.logdet_M - 0.5 * cg.quad / sigma2;
}

double collapsed_log_evidence(const CollapsedGaussian& cg, int n, const VariancePrior& variance) {
    if (variance.is_truncated()) {
        throw NonConjugateError("closed-form evidence needs an untruncated inverse-gamma variance prior");
    }
    const double a = variance.a;
    const double b = variance.b;
    return -0.5 * n * kLog2Pi - 0.5 * cg.logdet_M + a * std::log(b) - std::lgamma(a) +
           std::lgamma(a + 0.5 * n) - (a + 0.5 * n) * std::log(b + 0.5 * cg.quad);
}

std::vector<double> z_prior_variances(const ModelIndex& xi, const PriorSpec& prior, int p,
                                      bool full_dimension) {
    std::vector<double> d;
    const double slab_var = prior.slab.scale * prior.slab.scale;
    if (!full_dimension) {
        d.assign(xi.size(), slab_var);
        return d;
    }
    if (prior.spike.is_dirac()) {
        throw std::invalid_argument("dirac spike carries no full-dimension variance vector");
    }
    const double spike_var = prior.spike.scale * prior.spike.scale;
    d.assign(p, spike_var);
    for (int j : xi.members()) d[j - 1] = slab_var;
    return d;
}

double log_model_evidence(const ModelIndex& xi, const ProblemInstance& instance,
                          const PriorSpec& prior) {
    if (!prior.conjugate()) {
        throw NonConjugateError(
            "closed-form evidence needs a dirac or gaussian spike, gaussian slab, and "
            "untruncated inverse-gamma variance");
    }
    if (xi.max_member() > instance.p) throw std::invalid_argument("model index exceeds p");
    RankResult rr = is_full_rank(instance.X, xi);
    if (!rr.full_rank) {
        throw RankDeficiencyError("log_model_evidence: model is rank-deficient", rr.rank, xi.size());
    }
    const double yty = instance.Y.squaredNorm();
    CollapsedGaussian cg;
    if (prior.spike.is_dirac()) {
        Eigen::MatrixXd Xs = submatrix(instance.X, xi);
        cg = collapse_gaussian(Xs.transpose() * Xs, Xs.transpose() * instance.Y, yty,
                               z_prior_variances(xi, prior, instance.p, false));
    } else {
        cg = collapse_gaussian(instance.X.transpose() * instance.X,
                               instance.X.transpose() * instance.Y, yty,
                               z_prior_variances(xi, prior, instance.p, true));
    }
    return collapsed_log_evidence(cg, instance.n, prior.variance);
}

double log_evidence_upper_bound(int n, const VariancePrior& variance) {
    if (variance.is_truncated()) {
        throw NonConjugateError("evidence bound needs an untruncated inverse-gamma variance prior");
    }
    const double a = variance.a;
    const double b = variance.b;
    return -0.5 * n * kLog2Pi + a * std::log(b) - std::lgamma(a) + std::lgamma(a + 0.5 * n) -
           (a + 0.5 * n) * std::log(b);
}

} // namespace ssreg
