#pragma once

#include <map>
#include <string>
#include <vector>

#include "ssreg/constants.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/model_index.hpp"

namespace ssreg {

//! Prior on the noise variance sigma^2.
struct VariancePrior {
    enum class Kind { InverseGamma, TruncatedInverseGamma };
    Kind kind = Kind::InverseGamma;
    double a = 1.0;
    double b = 1.0;
    double lo = 0.0;  // truncation bounds (TruncatedInverseGamma only)
    double hi = 0.0;

    static VariancePrior inverse_gamma(double a, double b);
    static VariancePrior truncated_inverse_gamma(double a, double b, double lo, double hi);

    double density(double sigma2) const;
    double log_density(double sigma2) const;
    bool is_truncated() const { return kind == Kind::TruncatedInverseGamma; }
};

//! Near-zero component for coefficients outside the model, as a density of
//! z = beta/sigma.
struct SpikeDist {
    enum class Kind { Dirac, Gaussian, Laplace };
    Kind kind = Kind::Dirac;
    double scale = 0.0;  // tau0 for gaussian, rho0 (rate) for laplace

    static SpikeDist dirac();
    static SpikeDist gaussian(double tau0);
    static SpikeDist laplace(double rho0);

    bool is_dirac() const { return kind == Kind::Dirac; }
    //! Density of the continuous kinds; dirac has none and throws.
    double density(double z) const;
    //! Two-sided tail mass P(|Z| > z); dirac gives 0 for z > 0.
    double tail_mass(double z) const;
};

//! Diffuse component for in-model coefficients, as a density of z = beta/sigma.
struct SlabDist {
    enum class Kind { Gaussian, Laplace };
    Kind kind = Kind::Gaussian;
    double scale = 1.0;  // tau1 for gaussian, rho1 (rate) for laplace

    static SlabDist gaussian(double tau1);
    static SlabDist laplace(double rho1);

    double density(double z) const;
    double log_density(double z) const;
    double sup_density() const;  // attained at 0 for both kinds
    //! Lipschitz constant of log density on [-z1, z1].
    double log_lipschitz(double z1) const;
};

//! Prior over models (supports), stored unnormalized over all 2^p subsets;
//! the full-rank restriction is applied by the inference layer.
struct SelectionPrior {
    enum class Kind { Bernoulli, Csv };
    Kind kind = Kind::Bernoulli;
    int p = 0;
    double inclusion = 0.0;          // bernoulli: per-index inclusion probability 1/p
    std::vector<double> log_w;       // csv: log size weights, normalized to sum 1

    //! Independent inclusion with probability 1/p per index.
    static SelectionPrior bernoulli(int p);
    //! Size weights w(t) proportional to base^-t, t = 0..p.
    static SelectionPrior csv_geometric(int p, double base);
    //! Explicit size weights (any nonnegative sequence; normalized internally).
    static SelectionPrior csv_weights(int p, const std::vector<double>& w);

    double log_mass(const ModelIndex& xi) const;
    double mass(const ModelIndex& xi) const;
    //! log prior mass of a single model of size t (mass depends only on size).
    double log_mass_of_size(int t) const;
    //! Total prior mass over all models of size t.
    double size_marginal(int t) const;
    double log_size_marginal(int t) const;
    //! Total mass above size t: sum_{u > t} size_marginal(u).
    double tail(int t) const;
};

struct PriorSpec {
    VariancePrior variance;
    SelectionPrior selection;
    SpikeDist spike;
    SlabDist slab;

    //! True iff closed-form evidence is available (dirac/gaussian spike,
    //! gaussian slab, untruncated inverse-gamma variance).
    bool conjugate() const;
};

//! Builds a PriorSpec from flat config keys (variance.kind, variance.a, ...,
//! selection.kind, selection.csv_base, spike.kind, spike.scale, slab.kind,
//! slab.scale). p fixes the selection prior's dimension.
PriorSpec make_prior(const std::map<std::string, std::string>& section, int p);

//! Symmetric spike tail quantile: solves P(|Z| > z0n) = exp(-n).
double compute_z0n(const SpikeDist& spike, int n);

//! Exact infimum of the slab density over [-z1n, z1n].
double slab_floor(const SlabDist& slab, double z1n);

//! Prior mass of a single model (normalized over all 2^p subsets).
double selection_mass(const SelectionPrior& selection, const ModelIndex& xi);

//! One clause comparison: the two numbers and the verdict at this (n,p,s).
struct ClauseCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct PriorDiagnostics {
    double z0n = 0.0;
    double z1n = 0.0;
    double slab_floor = 0.0;
    double pi_true = 0.0;
    std::vector<double> tail;            // tail(t) for t = 1..t_max
    std::vector<double> tail_threshold;  // p^(-A2 t)
    bool a_positive = false;             // clause (a): g positive on a grid
    ClauseCheck b_pi;                    // pi_true vs p^(-A1 s)
    bool b_tail_pass = false;            // tail(t) <= p^(-A2 t) for all t
    ClauseCheck c_spike;                 // z0n vs (1/p) sqrt(log p / n)
    ClauseCheck d_slab;                  // slab_floor vs p^(-A3)
};

//! Evaluates the four prior-assumption clauses at the instance's (n,p,s).
PriorDiagnostics audit_assumption1(const PriorSpec& prior, const ProblemInstance& instance,
                                   const RegularityConstants& consts, int t_max);

} // namespace ssreg
