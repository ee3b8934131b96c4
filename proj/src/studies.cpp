#include "ssreg/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "ssreg/csv.hpp"
#include "ssreg/eigenvals.hpp"
#include "ssreg/errors.hpp"
#include "ssreg/posterior.hpp"
#include "ssreg/subset_scan.hpp"
#include "ssreg/theory.hpp"

namespace ssreg {

namespace {

constexpr std::uint64_t kExactAutoBudget = 100000;

std::vector<GridPoint> parse_grid(const std::string& text) {
    std::vector<GridPoint> grid;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(';', start);
        std::string item = text.substr(
            start, end == std::string::npos ? std::string::npos : end - start);
        std::size_t a = item.find_first_not_of(" \t");
        if (a != std::string::npos) {
            GridPoint g;
            if (std::sscanf(item.c_str(), " %d , %d , %d", &g.n, &g.p, &g.s) != 3) {
                throw ConfigError("grid entry must be n,p,s: " + item);
            }
            grid.push_back(g);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return grid;
}

SamplerConfig::Init parse_init(const std::string& name) {
    if (name == "empty") return SamplerConfig::Init::Empty;
    if (name == "truth") return SamplerConfig::Init::Truth;
    if (name == "screen") return SamplerConfig::Init::Screen;
    throw ConfigError("sampler.init must be empty, truth, or screen: " + name);
}

std::string sanitize_cell(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return text;
}

//! Members joined with '|' so the cell stays comma-free; "-" for the empty model.
std::string model_cell(const ModelIndex& xi) {
    if (xi.empty()) return "-";
    std::string out;
    for (int j : xi.members()) {
        if (!out.empty()) out += '|';
        out += std::to_string(j);
    }
    return out;
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

//! Design, truth, and per-design-derived quantities shared by every
//! replication at one grid point.
struct GridContext {
    GridPoint g;
    Eigen::MatrixXd X;
    ModelIndex xi_star;
    PriorSpec prior;
    double eps_n = 0.0;
    double z0n = 0.0;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::string lambda_method = "enumerated";
    double r_n = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // grid-level failure; replications inherit it
};

//! muev at the regularity order, falling back to subset sampling once exact
//! enumeration exceeds the budget.
std::pair<double, std::string> lambda_of(const Eigen::MatrixXd& X, const ModelIndex& xi_star,
                                         int t, int samples, std::uint64_t seed) {
    try {
        return {muev(X, xi_star, t).value, "enumerated"};
    } catch (const EnumerationBudgetError&) {
        return {muev_sampled(X, xi_star, t, samples, seed).value, "sampled"};
    }
}

GridContext prepare_grid_point(const ExperimentConfig& cfg, int gi) {
    GridContext ctx;
    ctx.g = cfg.grid[gi];
    try {
        const std::uint64_t design_seed = derive_seed(cfg.master_seed, 0xD519, gi);
        DesignDraw draw = draw_design(ctx.g.n, ctx.g.p, ctx.g.s, cfg.design, design_seed);
        ctx.X = std::move(draw.X);
        ctx.xi_star = draw.xi_star;
        ctx.prior = make_prior(cfg.prior_section, ctx.g.p);
        ctx.eps_n = epsilon_n(ctx.g.n, ctx.g.p, std::max(1, ctx.g.s));
        ctx.z0n = compute_z0n(ctx.prior.spike, ctx.g.n);
        const int t = std::max(1, static_cast<int>(std::floor((cfg.consts.K + 1.0) * ctx.g.s)));
        auto [lam, method] =
            lambda_of(ctx.X, ctx.xi_star, t, cfg.lambda_samples, derive_seed(design_seed, 0x3A3B));
        ctx.lambda = lam;
        ctx.lambda_method = method;
        if (ctx.lambda > 0.0) {
            ctx.r_n = selection_rate(ctx.prior, ctx.g.n, ctx.g.p, ctx.g.s, ctx.lambda,
                                     cfg.consts.eta, cfg.consts.K)
                          .r_n;
        }
    } catch (const std::exception& e) {
        ctx.error = e.what();
    }
    return ctx;
}

double signal_magnitude(const ExperimentConfig& cfg, const GridContext& ctx, double multiplier) {
    if (cfg.signal_mode == "absolute") return cfg.signal * multiplier;
    if (cfg.signal_mode == "rate") {
        return cfg.signal * multiplier * cfg.sigma_star *
               std::sqrt(std::log(static_cast<double>(ctx.g.p)) / ctx.g.n);
    }
    // beta-min units: multiples of the selection threshold
    if (!(ctx.lambda > 0.0)) {
        throw ConfigError("beta-min signal units need lambda > 0");
    }
    const double threshold =
        cfg.consts.M3 * cfg.sigma_star * ctx.eps_n / std::sqrt(ctx.lambda);
    return cfg.signal * multiplier * threshold;
}

StudyRow run_one(const ExperimentConfig& cfg, const GridContext& ctx, int gi, int arm_id,
                 const std::string& arm, int rep) {
    StudyRow row;
    row.study = cfg.study;
    row.n = ctx.g.n;
    row.p = ctx.g.p;
    row.s = ctx.g.s;
    row.design = cfg.design.to_string();
    row.arm = arm;
    row.replication = rep;
    row.seed = derive_seed(derive_seed(cfg.master_seed, 0x4E97, gi),
                           static_cast<std::uint64_t>(arm_id), rep);
    row.lambda = ctx.lambda;
    row.lambda_method = ctx.lambda_method;
    row.eps_n = ctx.eps_n;
    row.r_n = ctx.r_n;
    row.sigma_star = cfg.sigma_star;
    if (!ctx.error.empty()) {
        row.error = sanitize_cell(ctx.error);
        return row;
    }
    try {
        const double multiplier = arm == "below" ? cfg.below_factor : 1.0;
        row.signal = signal_magnitude(cfg, ctx, multiplier);
        ProblemInstance inst =
            generate_from_design(ctx.X, ctx.xi_star, row.signal, cfg.sigma_star, row.seed);
        const bool exact =
            cfg.mode == "exact" ||
            (cfg.mode == "auto" && ctx.prior.conjugate() &&
             subset_count_at_most(ctx.g.p, cfg.max_size) <= kExactAutoBudget);
        if (exact) {
            ModelPosterior post = exact_posterior(inst, ctx.prior, cfg.max_size);
            SummaryOptions opts;
            opts.draws_per_model = cfg.draws_per_model;
            opts.seed = derive_seed(row.seed, 0x5C11);
            row.summary =
                summarize(post, inst, ctx.prior, cfg.consts, ctx.lambda, ctx.z0n, opts);
        } else {
            SamplerConfig sc = cfg.sampler;
            sc.seed = derive_seed(row.seed, 0x6D22);
            ChainResult chain = mcmc_sample(inst, ctx.prior, sc);
            row.summary = summarize(chain, inst, cfg.consts, ctx.lambda, ctx.z0n);
        }
        row.l2_error_post_mean = (row.summary.post_mean_beta - inst.truth->beta_star).norm();
    } catch (const std::exception& e) {
        row.error = sanitize_cell(e.what());
    }
    return row;
}

struct Task {
    int gi = 0;
    int arm_id = 0;
    std::string arm;
    int rep = 0;
};

std::vector<StudyRow> run_tasks(const ExperimentConfig& cfg,
                                const std::vector<GridContext>& contexts,
                                const std::vector<Task>& tasks) {
    std::vector<StudyRow> rows(tasks.size());
    const int workers = std::max(1, cfg.workers);
    auto worker = [&](int w) {
        for (std::size_t i = w; i < tasks.size(); i += workers) {
            const Task& t = tasks[i];
            rows[i] = run_one(cfg, contexts[t.gi], t.gi, t.arm_id, t.arm, t.rep);
        }
    };
    if (workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::vector<GridContext> prepare_all(const ExperimentConfig& cfg) {
    std::vector<GridContext> contexts;
    contexts.reserve(cfg.grid.size());
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
        contexts.push_back(prepare_grid_point(cfg, static_cast<int>(gi)));
    }
    return contexts;
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(const ConfigMap& cfg) {
    ExperimentConfig out;
    out.study = get_string(cfg, "study", "");
    out.grid = parse_grid(get_string(cfg, "grid", ""));
    out.design = DesignSpec::parse(get_string(cfg, "design", "iid-gaussian"));
    out.signal_mode = get_string(cfg, "signal.mode", out.signal_mode);
    out.signal = get_double(cfg, "signal.value", out.signal);
    out.below_factor = get_double(cfg, "signal.below_factor", out.below_factor);
    out.sigma_star = get_double(cfg, "sigma_star", out.sigma_star);
    out.prior_section = section_of(cfg, "prior");
    out.consts.A1 = get_double(cfg, "constants.A1", out.consts.A1);
    out.consts.A2 = get_double(cfg, "constants.A2", out.consts.A2);
    out.consts.A3 = get_double(cfg, "constants.A3", out.consts.A3);
    out.consts.K = get_double(cfg, "constants.K", out.consts.K);
    out.consts.M1 = get_double(cfg, "constants.M1", out.consts.M1);
    out.consts.M2 = get_double(cfg, "constants.M2", out.consts.M2);
    out.consts.M3 = get_double(cfg, "constants.M3", out.consts.M3);
    out.consts.eta = get_double(cfg, "constants.eta", out.consts.eta);
    out.replications = get_int(cfg, "replications", out.replications);
    out.master_seed = get_u64(cfg, "seed", out.master_seed);
    out.mode = get_string(cfg, "inference.mode", out.mode);
    out.max_size = get_int(cfg, "inference.max_size", out.max_size);
    out.draws_per_model = get_int(cfg, "inference.draws_per_model", out.draws_per_model);
    out.sampler.sweeps = get_int(cfg, "sampler.sweeps", out.sampler.sweeps);
    out.sampler.burn_in = get_int(cfg, "sampler.burn_in", out.sampler.burn_in);
    out.sampler.thin = get_int(cfg, "sampler.thin", out.sampler.thin);
    out.sampler.w_add = get_double(cfg, "sampler.w_add", out.sampler.w_add);
    out.sampler.w_delete = get_double(cfg, "sampler.w_delete", out.sampler.w_delete);
    out.sampler.w_swap = get_double(cfg, "sampler.w_swap", out.sampler.w_swap);
    out.sampler.init = parse_init(get_string(cfg, "sampler.init", "empty"));
    out.sampler.screen_size = get_int(cfg, "sampler.screen_size", out.sampler.screen_size);
    out.lambda_samples = get_int(cfg, "lambda.samples", out.lambda_samples);
    out.alpha = get_double(cfg, "eigen.alpha", out.alpha);
    out.eigen_t = get_int(cfg, "eigen.t", out.eigen_t);
    out.audit_t_max = get_int(cfg, "audit.t_max", out.audit_t_max);
    return out;
}

void ExperimentConfig::validate() const {
    if (grid.empty()) throw ConfigError("config needs a nonempty grid");
    for (const GridPoint& g : grid) {
        if (g.n < 2 || g.p < 1 || g.s < 0 || g.s > g.p || g.s > g.n) {
            throw ConfigError("grid point needs n >= 2, 1 <= p, 0 <= s <= min(n, p)");
        }
    }
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (mode != "exact" && mode != "mcmc" && mode != "auto") {
        throw ConfigError("inference.mode must be exact, mcmc, or auto");
    }
    if (signal_mode != "absolute" && signal_mode != "rate" && signal_mode != "beta-min") {
        throw ConfigError("signal.mode must be absolute, rate, or beta-min");
    }
    if (study == "select" && signal_mode != "beta-min") {
        throw ConfigError("the select study places arms in beta-min units; "
                          "set signal.mode = beta-min");
    }
    if (sigma_star <= 0.0) throw ConfigError("sigma_star must be positive");
    if (max_size < 0) throw ConfigError("inference.max_size must be >= 0");
    if (draws_per_model < 1) throw ConfigError("inference.draws_per_model must be >= 1");
    if (lambda_samples < 1) throw ConfigError("lambda.samples must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    consts.validate();
    sampler.validate();
}

const std::vector<std::string>& study_row_columns() {
    static const std::vector<std::string> cols = {
        "study",        "n",
        "p",            "s",
        "design",       "arm",
        "replication",  "seed",
        "lambda",       "lambda_method",
        "eps_n",        "r_n",
        "signal",       "sigma_star",
        "prob_true_model", "freq_sigma",
        "freq_overfit", "freq_supset",
        "freq_spike",   "freq_l2_full",
        "freq_l2_restricted", "theta_hat",
        "theta_hat_supset", "theta_tilde",
        "l2_error_post_mean", "ess",
        "error"};
    return cols;
}

std::vector<std::string> study_row_cells(const StudyRow& row) {
    const bool failed = !row.error.empty();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto prob = [&](double v) { return fmt_f(failed ? nan : v, 4); };
    auto real = [&](double v) { return fmt_g(failed ? nan : v); };
    std::vector<std::string> cells;
    cells.reserve(study_row_columns().size());
    cells.push_back(row.study);
    cells.push_back(std::to_string(row.n));
    cells.push_back(std::to_string(row.p));
    cells.push_back(std::to_string(row.s));
    cells.push_back(row.design);
    cells.push_back(row.arm);
    cells.push_back(std::to_string(row.replication));
    cells.push_back(std::to_string(row.seed));
    cells.push_back(fmt_g(row.lambda));
    cells.push_back(row.lambda_method);
    cells.push_back(fmt_g(row.eps_n));
    cells.push_back(fmt_g(row.r_n));
    cells.push_back(fmt_g(row.signal));
    cells.push_back(fmt_g(row.sigma_star));
    cells.push_back(prob(row.summary.prob_true_model));
    cells.push_back(prob(row.summary.freq_sigma));
    cells.push_back(prob(row.summary.freq_overfit));
    cells.push_back(prob(row.summary.freq_supset));
    cells.push_back(prob(row.summary.freq_spike));
    cells.push_back(prob(row.summary.freq_l2_full));
    cells.push_back(prob(row.summary.freq_l2_restricted));
    cells.push_back(prob(row.summary.freq_theta_hat));
    cells.push_back(prob(row.summary.freq_theta_hat_supset));
    cells.push_back(prob(row.summary.freq_theta_tilde));
    cells.push_back(real(row.l2_error_post_mean));
    cells.push_back(real(row.summary.ess));
    cells.push_back(sanitize_cell(row.error));
    return cells;
}

std::vector<StudyRow> run_contraction_study(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<GridContext> contexts = prepare_all(cfg);
    std::vector<Task> tasks;
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
        for (int rep = 0; rep < cfg.replications; ++rep) {
            tasks.push_back({static_cast<int>(gi), 0, "main", rep});
        }
    }
    return run_tasks(cfg, contexts, tasks);
}

std::vector<StudyRow> run_selection_study(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<GridContext> contexts = prepare_all(cfg);
    for (std::size_t gi = 0; gi < contexts.size(); ++gi) {
        const GridContext& ctx = contexts[gi];
        if (ctx.error.empty() && !(ctx.r_n < 1.0)) {
            std::fprintf(stderr,
                         "warning: r_n = %g >= 1 at grid point (n=%d, p=%d, s=%d); the "
                         "strong-selection precondition is violated\n",
                         ctx.r_n, ctx.g.n, ctx.g.p, ctx.g.s);
        }
    }
    std::vector<Task> tasks;
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
        for (int arm_id = 0; arm_id < 2; ++arm_id) {
            const std::string arm = arm_id == 0 ? "above" : "below";
            for (int rep = 0; rep < cfg.replications; ++rep) {
                tasks.push_back({static_cast<int>(gi), arm_id, arm, rep});
            }
        }
    }
    return run_tasks(cfg, contexts, tasks);
}

void write_study_rows(const std::string& path, const std::vector<StudyRow>& rows) {
    CsvWriter writer(path, study_row_columns());
    for (const StudyRow& row : rows) writer.write_row(study_row_cells(row));
    writer.close();
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

} // namespace

void write_grid_aggregates(const std::string& path, const std::vector<StudyRow>& rows) {
    struct Group {
        const StudyRow* first = nullptr;
        int total = 0;
        int errors = 0;
        std::vector<double> prob_true, theta_hat, theta_hat_supset, theta_tilde, overfit, l2,
            ess;
    };
    std::vector<std::string> order;
    std::map<std::string, Group> groups;
    for (const StudyRow& row : rows) {
        const std::string key = std::to_string(row.n) + "/" + std::to_string(row.p) + "/" +
                                std::to_string(row.s) + "/" + row.arm;
        auto [it, inserted] = groups.try_emplace(key);
        Group& g = it->second;
        if (inserted) {
            g.first = &row;
            order.push_back(key);
        }
        ++g.total;
        if (!row.error.empty()) {
            ++g.errors;
            continue;
        }
        g.prob_true.push_back(row.summary.prob_true_model);
        g.theta_hat.push_back(row.summary.freq_theta_hat);
        g.theta_hat_supset.push_back(row.summary.freq_theta_hat_supset);
        g.theta_tilde.push_back(row.summary.freq_theta_tilde);
        g.overfit.push_back(row.summary.freq_overfit);
        g.l2.push_back(row.l2_error_post_mean);
        if (std::isfinite(row.summary.ess)) g.ess.push_back(row.summary.ess);
    }

    CsvWriter writer(path, {"study", "n", "p", "s", "arm", "rows", "errors", "lambda",
                            "lambda_method", "eps_n", "r_n", "rn_pass",
                            "mean_prob_true_model", "mean_theta_hat",
                            "mean_theta_hat_supset", "mean_theta_tilde", "mean_freq_overfit",
                            "median_l2_error", "l2_bound", "frac_l2_le_bound", "median_ess"});
    for (const std::string& key : order) {
        const Group& g = groups[key];
        const StudyRow& r = *g.first;
        const double bound = r.lambda > 0.0
                                 ? 3.0 * r.sigma_star * r.eps_n / std::sqrt(r.lambda)
                                 : std::numeric_limits<double>::quiet_NaN();
        double within = std::numeric_limits<double>::quiet_NaN();
        if (!g.l2.empty() && std::isfinite(bound)) {
            int hits = 0;
            for (double v : g.l2) hits += v <= bound;
            within = static_cast<double>(hits) / static_cast<double>(g.l2.size());
        }
        writer.write_row({r.study, std::to_string(r.n), std::to_string(r.p),
                          std::to_string(r.s), r.arm, std::to_string(g.total),
                          std::to_string(g.errors), fmt_g(r.lambda), r.lambda_method,
                          fmt_g(r.eps_n), fmt_g(r.r_n), bool_cell(r.r_n < 1.0),
                          fmt_f(mean_of(g.prob_true), 4), fmt_f(mean_of(g.theta_hat), 4),
                          fmt_f(mean_of(g.theta_hat_supset), 4),
                          fmt_f(mean_of(g.theta_tilde), 4), fmt_f(mean_of(g.overfit), 4),
                          fmt_g(median_of(g.l2)), fmt_g(bound), fmt_f(within, 4),
                          fmt_g(median_of(g.ess))});
    }
    writer.close();
}

void run_prior_audit(const ExperimentConfig& cfg, const std::string& path) {
    cfg.validate();
    CsvWriter writer(path, {"study", "n", "p", "s", "design", "seed", "z0n", "z1n",
                            "slab_floor", "pi_true", "a_positive", "b_pi_lhs", "b_pi_rhs",
                            "b_pi_pass", "b_tail_pass", "c_lhs", "c_rhs", "c_pass", "d_lhs",
                            "d_rhs", "d_pass", "tail1", "tail1_bound", "all_pass", "error"});
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
        const GridPoint g = cfg.grid[gi];
        const std::uint64_t seed = derive_seed(cfg.master_seed, 0xA0D1, gi);
        std::vector<std::string> cells = {cfg.study,          std::to_string(g.n),
                                          std::to_string(g.p), std::to_string(g.s),
                                          cfg.design.to_string(), std::to_string(seed)};
        try {
            GridContext ctx = prepare_grid_point(cfg, static_cast<int>(gi));
            if (!ctx.error.empty()) throw ConfigError(ctx.error);
            const double magnitude = signal_magnitude(cfg, ctx, 1.0);
            ProblemInstance inst =
                generate_from_design(ctx.X, ctx.xi_star, magnitude, cfg.sigma_star, seed);
            const int t_max = std::min(g.p, cfg.audit_t_max);
            PriorDiagnostics diag = audit_assumption1(ctx.prior, inst, cfg.consts, t_max);
            const bool all = diag.a_positive && diag.b_pi.pass && diag.b_tail_pass &&
                             diag.c_spike.pass && diag.d_slab.pass;
            const double tail1 = diag.tail.empty() ? 0.0 : diag.tail.front();
            const double tail1_bound =
                diag.tail_threshold.empty() ? 0.0 : diag.tail_threshold.front();
            cells.insert(cells.end(),
                         {fmt_g(diag.z0n), fmt_g(diag.z1n), fmt_g(diag.slab_floor),
                          fmt_g(diag.pi_true), bool_cell(diag.a_positive),
                          fmt_g(diag.b_pi.lhs), fmt_g(diag.b_pi.rhs),
                          bool_cell(diag.b_pi.pass), bool_cell(diag.b_tail_pass),
                          fmt_g(diag.c_spike.lhs), fmt_g(diag.c_spike.rhs),
                          bool_cell(diag.c_spike.pass), fmt_g(diag.d_slab.lhs),
                          fmt_g(diag.d_slab.rhs), bool_cell(diag.d_slab.pass), fmt_g(tail1),
                          fmt_g(tail1_bound), bool_cell(all), ""});
        } catch (const std::exception& e) {
            while (cells.size() < 24) cells.push_back("nan");
            cells.push_back(sanitize_cell(e.what()));
        }
        writer.write_row(cells);
    }
    writer.close();
}

void run_eigen_audit(const ExperimentConfig& cfg, const std::string& path) {
    cfg.validate();
    CsvWriter writer(path, {"study", "n", "p", "s", "design", "seed", "t", "alpha", "muev",
                            "muev_witness", "msev", "msev_witness", "mnev", "mnev_witness",
                            "mnev_premise", "mrev", "mrev_method", "mrev_grid_deg", "lambda",
                            "lambda_method", "assumption2_pass", "ordering_pass", "error"});
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
        const GridPoint g = cfg.grid[gi];
        const std::uint64_t design_seed = derive_seed(cfg.master_seed, 0xD519, gi);
        const int t_lambda =
            std::max(1, static_cast<int>(std::floor((cfg.consts.K + 1.0) * g.s)));
        const int t = cfg.eigen_t > 0 ? cfg.eigen_t : t_lambda;
        std::vector<std::string> cells = {cfg.study,          std::to_string(g.n),
                                          std::to_string(g.p), std::to_string(g.s),
                                          cfg.design.to_string(), std::to_string(design_seed),
                                          std::to_string(t),   fmt_g(cfg.alpha)};
        try {
            DesignDraw draw = draw_design(g.n, g.p, g.s, cfg.design, design_seed);
            EigenReport report =
                audit_eigen(draw.X, draw.xi_star, t, cfg.alpha, kDefaultSubsetCap,
                            cfg.workers, 64, derive_seed(design_seed, 0xE16E));
            double lambda = report.muev.value;
            std::string lambda_method = "enumerated";
            if (t != t_lambda) {
                std::tie(lambda, lambda_method) =
                    lambda_of(draw.X, draw.xi_star, t_lambda, cfg.lambda_samples,
                              derive_seed(design_seed, 0x3A3B));
            }
            const bool ordering = report.muev.value >= report.msev.value - 1e-9 &&
                                  report.msev.value >= report.mrev.value - 1e-6 &&
                                  (!report.mnev_premise_holds ||
                                   report.muev.value >= report.mnev.value - 1e-9);
            cells.insert(cells.end(),
                         {fmt_g(report.muev.value), model_cell(report.muev.witness),
                          fmt_g(report.msev.value), model_cell(report.msev.witness),
                          fmt_g(report.mnev.value), model_cell(report.mnev.witness),
                          bool_cell(report.mnev_premise_holds), fmt_g(report.mrev.value),
                          report.mrev.method, fmt_g(report.mrev.grid_resolution_deg),
                          fmt_g(lambda), lambda_method, bool_cell(lambda > 0.0),
                          bool_cell(ordering), ""});
        } catch (const std::exception& e) {
            while (cells.size() < 22) cells.push_back("nan");
            cells.push_back(sanitize_cell(e.what()));
        }
        writer.write_row(cells);
    }
    writer.close();
}

void write_run_manifest(const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& fields) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    for (const auto& [key, value] : fields) out << key << ": " << value << "\n";
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file for digest: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace ssreg
