#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "ssreg/model_index.hpp"
#include "ssreg/rng.hpp"

namespace ssreg {

enum class DesignKind { IidGaussian, Equicorrelated, DuplicateColumnDemo };

//! Synthetic design family. Text forms: "iid-gaussian", "equicorrelated:RHO",
//! "duplicate-column-demo".
struct DesignSpec {
    DesignKind kind = DesignKind::IidGaussian;
    double rho = 0.0;

    static DesignSpec parse(const std::string& text);
    std::string to_string() const;
};

struct GroundTruth {
    Eigen::VectorXd beta_star;
    double sigma_star = 1.0;
    ModelIndex xi_star;
};

//! One regression problem: standardized design, centered response, and (in
//! simulation mode) the generating truth.
struct ProblemInstance {
    int n = 0;
    int p = 0;
    Eigen::MatrixXd X;
    Eigen::VectorXd Y;
    std::optional<GroundTruth> truth;
    std::uint64_t seed = 0;

    bool has_truth() const { return truth.has_value(); }
};

//! sqrt(s * log p / n); the target estimation-error scale.
double epsilon_n(int n, int p, int s);

//! Centers each column, then rescales it to Euclidean norm sqrt(n).
//! Throws if a column is constant (zero after centering).
void standardize_columns(Eigen::MatrixXd& X);

//! Draws a standardized design plus a random full-rank support of size s.
struct DesignDraw {
    Eigen::MatrixXd X;
    ModelIndex xi_star;
};
DesignDraw draw_design(int n, int p, int s, const DesignSpec& spec, std::uint64_t design_seed);

//! Completes a design draw into an instance: signed coefficients of magnitude
//! |signal| on xi_star, gaussian noise scaled by sigma_star, centered response.
ProblemInstance generate_from_design(const Eigen::MatrixXd& X, const ModelIndex& xi_star,
                                     double signal, double sigma_star,
                                     std::uint64_t replication_seed);

//! One-call generation; design and replication randomness both derive from seed.
ProblemInstance generate_instance(int n, int p, int s, double signal, double sigma_star,
                                  const DesignSpec& design, std::uint64_t seed);

//! Plain-text bundle holding X, Y, ground truth, and the generating seed.
void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

} // namespace ssreg
