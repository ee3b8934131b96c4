#include "ssreg/instance.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ssreg/csv.hpp"
#include "ssreg/errors.hpp"
#include "ssreg/linalg.hpp"

namespace ssreg {

DesignSpec DesignSpec::parse(const std::string& text) {
    DesignSpec d;
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    if (name == "iid-gaussian") {
        d.kind = DesignKind::IidGaussian;
    } else if (name == "equicorrelated") {
        d.kind = DesignKind::Equicorrelated;
        if (colon == std::string::npos)
            throw std::invalid_argument("equicorrelated design needs a correlation, e.g. equicorrelated:0.5");
        d.rho = std::stod(text.substr(colon + 1));
    } else if (name == "duplicate-column-demo") {
        d.kind = DesignKind::DuplicateColumnDemo;
    } else {
        throw std::invalid_argument("unknown design spec '" + text + "'");
    }
    return d;
}

std::string DesignSpec::to_string() const {
    switch (kind) {
        case DesignKind::IidGaussian: return "iid-gaussian";
        case DesignKind::Equicorrelated: return "equicorrelated:" + fmt_g(rho, 6);
        case DesignKind::DuplicateColumnDemo: return "duplicate-column-demo";
    }
    return "?";
}

double epsilon_n(int n, int p, int s) {
    if (n < 2 || p < 2) throw std::invalid_argument("epsilon_n needs n, p >= 2");
    if (s < 1) throw std::invalid_argument("epsilon_n needs s >= 1");
    return std::sqrt(static_cast<double>(s) * std::log(static_cast<double>(p)) / n);
}

void standardize_columns(Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    const double target = std::sqrt(static_cast<double>(n));
    for (int j = 0; j < X.cols(); ++j) {
        X.col(j).array() -= X.col(j).mean();
        double norm = X.col(j).norm();
        if (norm <= 1e-300)
            throw std::invalid_argument("column " + std::to_string(j + 1) +
                                        " is constant and cannot be standardized");
        X.col(j) *= target / norm;
    }
}

namespace {

Eigen::MatrixXd raw_design(int n, int p, const DesignSpec& spec, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    switch (spec.kind) {
        case DesignKind::IidGaussian: {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) X(i, j) = gauss(rng);
            break;
        }
        case DesignKind::Equicorrelated: {
            if (p >= 2 && (spec.rho <= -1.0 / (p - 1) || spec.rho >= 1.0))
                throw std::invalid_argument("equicorrelated rho must lie in (-1/(p-1), 1)");
            Eigen::MatrixXd Sigma =
                Eigen::MatrixXd::Constant(p, p, spec.rho) +
                (1.0 - spec.rho) * Eigen::MatrixXd::Identity(p, p);
            Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
            if (llt.info() != Eigen::Success)
                throw std::invalid_argument("equicorrelated covariance is not positive definite");
            Eigen::MatrixXd L = llt.matrixL();
            Eigen::VectorXd z(p);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < p; ++j) z(j) = gauss(rng);
                X.row(i) = (L * z).transpose();
            }
            break;
        }
        case DesignKind::DuplicateColumnDemo: {
            if (p < 2) throw std::invalid_argument("duplicate-column-demo needs p >= 2");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) X(i, j) = gauss(rng);
            X.col(1) = X.col(0);
            break;
        }
    }
    return X;
}

} // namespace

DesignDraw draw_design(int n, int p, int s, const DesignSpec& spec, std::uint64_t design_seed) {
    if (n < 2 || p < 1) throw std::invalid_argument("need n >= 2 and p >= 1");
    if (s > p) throw std::invalid_argument("support size s exceeds p");
    if (s > n) throw std::invalid_argument("support size s exceeds n; no full-rank truth exists");
    Rng rng = make_rng(derive_seed(design_seed, 0x0de51617));
    DesignDraw d;
    d.X = raw_design(n, p, spec, rng);
    standardize_columns(d.X);

    // Random support, redrawn until the corresponding columns are independent
    // (relevant only for designs with built-in collinearity).
    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> pool = all;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(s);
        ModelIndex cand(std::move(pool));
        if (is_full_rank(d.X, cand).full_rank) {
            d.xi_star = cand;
            return d;
        }
    }
    throw RankDeficiencyError("could not draw a full-rank support of size " + std::to_string(s),
                              -1, s);
}

ProblemInstance generate_from_design(const Eigen::MatrixXd& X, const ModelIndex& xi_star,
                                     double signal, double sigma_star,
                                     std::uint64_t replication_seed) {
    if (sigma_star <= 0.0) throw std::invalid_argument("sigma_star must be positive");
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (!xi_star.empty() && xi_star.max_member() > p)
        throw std::invalid_argument("xi_star references a column beyond p");

    Rng rng = make_rng(derive_seed(replication_seed, 0x5e9a1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    ProblemInstance inst;
    inst.n = n;
    inst.p = p;
    inst.X = X;
    inst.seed = replication_seed;

    GroundTruth truth;
    truth.sigma_star = sigma_star;
    truth.xi_star = xi_star;
    truth.beta_star = Eigen::VectorXd::Zero(p);
    for (int j : xi_star.members())
        truth.beta_star(j - 1) = (coin(rng) ? 1.0 : -1.0) * signal;
    if (signal == 0.0) truth.xi_star = ModelIndex{};

    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps(i) = gauss(rng);
    inst.Y = X * truth.beta_star + sigma_star * eps;
    inst.Y.array() -= inst.Y.mean();
    inst.truth = std::move(truth);
    return inst;
}

ProblemInstance generate_instance(int n, int p, int s, double signal, double sigma_star,
                                  const DesignSpec& design, std::uint64_t seed) {
    DesignDraw d = draw_design(n, p, s, design, derive_seed(seed, 1));
    return generate_from_design(d.X, d.xi_star, signal, sigma_star, derive_seed(seed, 2));
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "instance-bundle v1\n";
    out << "n " << inst.n << "\n";
    out << "p " << inst.p << "\n";
    out << "seed " << inst.seed << "\n";
    if (inst.truth) {
        out << "sigma_star " << fmt_g(inst.truth->sigma_star, 17) << "\n";
        out << "xi_star";
        for (int j : inst.truth->xi_star.members()) out << ' ' << j;
        out << "\n";
        out << "beta_star";
        for (int j = 0; j < inst.p; ++j) out << ' ' << fmt_g(inst.truth->beta_star(j), 17);
        out << "\n";
    }
    out << "X\n";
    for (int i = 0; i < inst.n; ++i) {
        for (int j = 0; j < inst.p; ++j) {
            if (j) out << ' ';
            out << fmt_g(inst.X(i, j), 17);
        }
        out << "\n";
    }
    out << "Y\n";
    for (int i = 0; i < inst.n; ++i) out << fmt_g(inst.Y(i), 17) << "\n";
}

ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("instance-bundle", 0) != 0)
        throw std::runtime_error(path + ": not an instance bundle");

    ProblemInstance inst;
    std::optional<GroundTruth> truth;
    std::vector<double> beta;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "n") ss >> inst.n;
        else if (tag == "p") ss >> inst.p;
        else if (tag == "seed") ss >> inst.seed;
        else if (tag == "sigma_star") {
            if (!truth) truth.emplace();
            ss >> truth->sigma_star;
        } else if (tag == "xi_star") {
            if (!truth) truth.emplace();
            std::vector<int> idx;
            int j;
            while (ss >> j) idx.push_back(j);
            truth->xi_star = ModelIndex(std::move(idx));
        } else if (tag == "beta_star") {
            if (!truth) truth.emplace();
            double v;
            while (ss >> v) beta.push_back(v);
        } else if (tag == "X") {
            break;
        }
    }
    if (inst.n <= 0 || inst.p <= 0) throw std::runtime_error(path + ": missing dimensions");
    inst.X.resize(inst.n, inst.p);
    for (int i = 0; i < inst.n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated X block");
        std::istringstream ss(line);
        for (int j = 0; j < inst.p; ++j)
            if (!(ss >> inst.X(i, j))) throw std::runtime_error(path + ": short X row");
    }
    if (!std::getline(in, line) || line != "Y") throw std::runtime_error(path + ": missing Y block");
    inst.Y.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated Y block");
        inst.Y(i) = std::stod(line);
    }
    if (truth) {
        if (static_cast<int>(beta.size()) != inst.p)
            throw std::runtime_error(path + ": beta_star length mismatch");
        truth->beta_star = Eigen::Map<Eigen::VectorXd>(beta.data(), inst.p);
        inst.truth = std::move(truth);
    }
    return inst;
}

} // namespace ssreg
