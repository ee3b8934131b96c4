#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ssreg/config.hpp"
#include "ssreg/constants.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/mcmc.hpp"
#include "ssreg/summary.hpp"

namespace ssreg {

inline constexpr const char* kToolVersion = "0.1.0";

struct GridPoint {
    int n = 0;
    int p = 0;
    int s = 0;
};

//! Everything a batch run needs, assembled from a config file plus CLI
//! overrides (seed, output directory, workers).
struct ExperimentConfig {
    std::string study;  // contract | select | audit-prior | audit-eigen
    std::vector<GridPoint> grid;
    DesignSpec design;

    //! Coefficient magnitude. mode "absolute" uses the value as is; "rate"
    //! uses value * sigma_star * sqrt(log p / n); "beta-min" uses value times
    //! the selection threshold M3 sigma_star eps_n / sqrt(lambda).
    std::string signal_mode = "rate";
    double signal = 10.0;
    double below_factor = 0.1;  // select study: low-signal arm multiplier
    double sigma_star = 1.0;

    ConfigMap prior_section;  // prior.* keys; the prior is rebuilt at each p
    RegularityConstants consts;

    int replications = 1;
    std::uint64_t master_seed = 1;

    std::string mode = "auto";   // exact | mcmc | auto
    int max_size = 6;            // exact-mode model size ceiling
    int draws_per_model = 1000;  // exact-mode conditional MC draws
    SamplerConfig sampler;
    int lambda_samples = 500;  // subsets drawn when muev falls back to sampling
    double alpha = 1.0;        // cone parameter for the eigen audit
    int eigen_t = 0;           // eigen audit order; 0 = floor((K+1) s)
    int audit_t_max = 10;      // prior audit: largest size in the tail check

    int workers = 1;
    std::string out_dir = ".";

    static ExperimentConfig from_config(const ConfigMap& cfg);
    void validate() const;
};

//! One result record; the column set is frozen (tests diff it against a
//! committed schema file). Probabilities are written with four decimals,
//! other reals in shortest-round-trip style.
struct StudyRow {
    std::string study;
    int n = 0;
    int p = 0;
    int s = 0;
    std::string design;
    std::string arm = "main";  // main | above | below
    int replication = 0;
    std::uint64_t seed = 0;  // reproduces this row's instance and chain
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::string lambda_method;  // enumerated | sampled
    double eps_n = std::numeric_limits<double>::quiet_NaN();
    double r_n = std::numeric_limits<double>::quiet_NaN();
    double signal = std::numeric_limits<double>::quiet_NaN();
    double sigma_star = std::numeric_limits<double>::quiet_NaN();
    PosteriorSummary summary;
    double l2_error_post_mean = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // nonempty marks a failed replication
};

const std::vector<std::string>& study_row_columns();
std::vector<std::string> study_row_cells(const StudyRow& row);

//! Contraction study: per grid point and replication, fit the posterior and
//! record the concentration-event probabilities and the posterior-mean error.
std::vector<StudyRow> run_contraction_study(const ExperimentConfig& cfg);

//! Selection study: the same pipeline with paired signal arms placed above
//! and below the beta-min threshold, recording r_n per grid point.
std::vector<StudyRow> run_selection_study(const ExperimentConfig& cfg);

void write_study_rows(const std::string& path, const std::vector<StudyRow>& rows);

//! Per-(grid point, arm) aggregation of a row table: means of the event
//! probabilities, the median posterior-mean error against its target radius,
//! and the r_n verdict.
void write_grid_aggregates(const std::string& path, const std::vector<StudyRow>& rows);

//! Prior-assumption audit across the grid; one row per grid point.
void run_prior_audit(const ExperimentConfig& cfg, const std::string& path);

//! Eigenvalue audit across the grid; one row per grid point.
void run_eigen_audit(const ExperimentConfig& cfg, const std::string& path);

//! Key/value sidecar recording how a run was produced (command, config
//! digest, wall time, ...). Timing lives here so result CSVs stay
//! byte-reproducible.
void write_run_manifest(const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& fields);

//! FNV-1a hash of a file's bytes, as fixed-width hex.
std::string file_digest(const std::string& path);

} // namespace ssreg
