#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssreg/config.hpp"
#include "ssreg/csv.hpp"
#include "ssreg/eigenvals.hpp"
#include "ssreg/errors.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/mcmc.hpp"
#include "ssreg/posterior.hpp"
#include "ssreg/priors.hpp"
#include "ssreg/studies.hpp"
#include "ssreg/summary.hpp"
#include "ssreg/theory.hpp"

namespace {

using namespace ssreg;

struct GlobalFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    bool workers_given = false;
};

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

ExperimentConfig load_experiment(const GlobalFlags& g, const std::string& study) {
    if (g.config_path.empty()) throw ConfigError(study + " needs --config FILE");
    ConfigMap raw = load_config(g.config_path);
    ExperimentConfig cfg = ExperimentConfig::from_config(raw);
    cfg.study = study;
    if (g.seed_given) cfg.master_seed = g.seed;
    if (g.workers_given) cfg.workers = g.workers;
    cfg.out_dir = g.out_dir;
    return cfg;
}

void finish_manifest(const GlobalFlags& g, const std::string& command,
                     const std::chrono::steady_clock::time_point& start, int rows,
                     const std::vector<std::string>& outputs) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::vector<std::pair<std::string, std::string>> fields;
    fields.emplace_back("tool", "ssreg");
    fields.emplace_back("version", kToolVersion);
    fields.emplace_back("command", command);
    if (!g.config_path.empty()) {
        fields.emplace_back("config", g.config_path);
        fields.emplace_back("config_digest", file_digest(g.config_path));
    }
    fields.emplace_back("rows", std::to_string(rows));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", wall);
    fields.emplace_back("wall_seconds", buf);
    for (const std::string& o : outputs) fields.emplace_back("output", o);
    write_run_manifest(g.out_dir + "/run_manifest.txt", fields);
}

int run_row_study(const GlobalFlags& g, const std::string& study, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load_experiment(g, study);
    std::filesystem::create_directories(g.out_dir);
    std::vector<StudyRow> rows =
        study == "contract" ? run_contraction_study(cfg) : run_selection_study(cfg);
    const std::string results = g.out_dir + "/results.csv";
    const std::string aggregate = g.out_dir + "/aggregate.csv";
    write_study_rows(results, rows);
    write_grid_aggregates(aggregate, rows);
    finish_manifest(g, command, start, static_cast<int>(rows.size()), {results, aggregate});
    int failed = 0;
    for (const StudyRow& r : rows) failed += !r.error.empty();
    if (failed > 0) {
        std::fprintf(stderr, "warning: %d of %zu replications wrote error rows\n", failed,
                     rows.size());
    }
    std::printf("%s study: %zu rows -> %s\n", study.c_str(), rows.size(), results.c_str());
    return 0;
}

int run_audit(const GlobalFlags& g, const std::string& study, const std::string& command) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load_experiment(g, study);
    std::filesystem::create_directories(g.out_dir);
    const std::string path =
        g.out_dir + (study == "audit-prior" ? "/audit_prior.csv" : "/audit_eigen.csv");
    if (study == "audit-prior") {
        run_prior_audit(cfg, path);
    } else {
        run_eigen_audit(cfg, path);
    }
    finish_manifest(g, command, start, static_cast<int>(cfg.grid.size()), {path});
    std::printf("%s: %zu grid points -> %s\n", study.c_str(), cfg.grid.size(), path.c_str());
    return 0;
}

std::string pipe_cell(const ModelIndex& xi) {
    if (xi.empty()) return "-";
    std::string out;
    for (int j : xi.members()) {
        if (!out.empty()) out += '|';
        out += std::to_string(j);
    }
    return out;
}

int run_eigen_direct(const std::string& matrix_path, const std::string& xi_text, int t,
                     double alpha, int workers) {
    Eigen::MatrixXd X = read_matrix_csv(matrix_path);
    ModelIndex xi_star = ModelIndex::parse(xi_text);
    EigenReport report = audit_eigen(X, xi_star, t, alpha, kDefaultSubsetCap, workers);
    const bool ordering = report.muev.value >= report.msev.value - 1e-9 &&
                          report.msev.value >= report.mrev.value - 1e-6;
    std::printf("n,p,xi_star,t,alpha,muev,muev_witness,msev,msev_witness,mnev,mnev_witness,"
                "mnev_premise,mrev,mrev_method,mrev_grid_deg,ordering_pass\n");
    std::printf("%d,%d,%s,%d,%s,%s,%s,%s,%s,%s,%s,%d,%s,%s,%s,%d\n",
                static_cast<int>(X.rows()), static_cast<int>(X.cols()),
                pipe_cell(xi_star).c_str(), t, fmt_g(alpha).c_str(),
                fmt_g(report.muev.value).c_str(), pipe_cell(report.muev.witness).c_str(),
                fmt_g(report.msev.value).c_str(), pipe_cell(report.msev.witness).c_str(),
                fmt_g(report.mnev.value).c_str(), pipe_cell(report.mnev.witness).c_str(),
                report.mnev_premise_holds ? 1 : 0, fmt_g(report.mrev.value).c_str(),
                report.mrev.method.c_str(), fmt_g(report.mrev.grid_resolution_deg).c_str(),
                ordering ? 1 : 0);
    return 0;
}

ConfigMap parse_params(const std::string& text) {
    ConfigMap params;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        std::string item =
            text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (!item.empty()) {
            std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--params entries must be key=value: " + item);
            }
            params[item.substr(0, eq)] = item.substr(eq + 1);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return params;
}

double need_double(const ConfigMap& params, const std::string& key) {
    if (!has_key(params, key)) throw ConfigError("--params needs " + key + "=...");
    return get_double(params, key, 0.0);
}

int need_int(const ConfigMap& params, const std::string& key) {
    if (!has_key(params, key)) throw ConfigError("--params needs " + key + "=...");
    return get_int(params, key, 0);
}

std::string comma_free(std::string text) {
    for (char& c : text) {
        if (c == ',') c = ' ';
    }
    return text;
}

void print_bound_row(const std::string& check, const BoundComparison& cmp, bool assertable) {
    std::printf("%s,%s,%s,%s,%s\n", check.c_str(), comma_free(cmp.context).c_str(),
                fmt_g(cmp.bound_value).c_str(), fmt_g(cmp.exact_or_mc_value).c_str(),
                assertable ? (cmp.holds ? "1" : "0")
                           : (cmp.holds ? "1 (reported)" : "0 (reported)"));
}

int run_bounds(const GlobalFlags& g, const std::string& check, const std::string& params_text,
               const std::string& prior_path) {
    ConfigMap params = parse_params(params_text);
    std::printf("check,context,bound,exact,holds\n");
    if (check == "chi2") {
        if (has_key(params, "eps")) {
            auto [upper, lower] = chi2_norm_bounds(need_int(params, "n"),
                                                   need_int(params, "d"),
                                                   need_double(params, "eps"));
            print_bound_row("chi2-norm", upper, true);
            print_bound_row("chi2-norm", lower, true);
        } else {
            BoundComparison cmp =
                chi2_tail_bound(need_int(params, "d"), need_double(params, "t"));
            print_bound_row("chi2-tail", cmp, true);
        }
        return 0;
    }
    if (check == "pelekis") {
        BoundComparison cmp = pelekis_bound(need_int(params, "p"), need_double(params, "mu"),
                                            need_int(params, "t"));
        print_bound_row("pelekis", cmp, false);
        return 0;
    }
    if (check == "ratio") {
        const double value = posterior_ratio_bound(
            need_int(params, "t_minus_s"), need_int(params, "n"), need_int(params, "p"),
            need_double(params, "lambda"), need_double(params, "eta"),
            need_double(params, "sup_h1"));
        std::printf("ratio,%s,%s,nan,-\n", comma_free(params_text).c_str(),
                    fmt_g(value).c_str());
        return 0;
    }
    if (check == "rn") {
        if (prior_path.empty()) throw ConfigError("bounds --check rn needs --prior FILE");
        ConfigMap prior_cfg = load_config(prior_path);
        const int p = need_int(params, "p");
        PriorSpec prior = make_prior(section_of(prior_cfg, "prior"), p);
        SelectionRateReport report = selection_rate(
            prior, need_int(params, "n"), p, need_int(params, "s"),
            need_double(params, "lambda"), need_double(params, "eta"),
            need_double(params, "K"), get_bool(params, "per_model", false));
        std::string factors;
        for (double f : report.size_factors) {
            if (!factors.empty()) factors += '|';
            factors += fmt_g(f, 6);
        }
        std::printf("rn,%s slab_factor=%s factors=%s,1,%s,%s\n",
                    comma_free(params_text).c_str(), fmt_g(report.slab_factor, 6).c_str(),
                    factors.c_str(), fmt_g(report.r_n).c_str(), report.passes ? "1" : "0");
        return 0;
    }
    if (check == "omega") {
        const int n = need_int(params, "n");
        const int p = need_int(params, "p");
        const int s = need_int(params, "s");
        DesignSpec design = DesignSpec::parse(get_string(params, "design", "iid-gaussian"));
        const std::uint64_t seed =
            g.seed_given ? g.seed : get_u64(params, "seed", 1);
        DesignDraw draw = draw_design(n, p, s, design, derive_seed(seed, 0xD519, 0));
        BoundComparison cmp = omega_event_frequency(
            draw.X, draw.xi_star, need_double(params, "K"), need_double(params, "eta"),
            get_int(params, "draws", 10000), derive_seed(seed, 0x03E6));
        print_bound_row("omega", cmp, true);
        return 0;
    }
    throw ConfigError("--check must be chi2, pelekis, ratio, rn, or omega");
}

int run_posterior(const GlobalFlags& g, const std::string& instance_path,
                  const std::string& prior_path, const std::string& mode, int max_size,
                  int sweeps, int burn_in, int thin, const std::string& init) {
    ProblemInstance inst = load_instance(instance_path);
    ConfigMap prior_cfg = prior_path.empty() ? ConfigMap{} : load_config(prior_path);
    PriorSpec prior = make_prior(section_of(prior_cfg, "prior"), inst.p);
    RegularityConstants consts;
    consts.A1 = get_double(prior_cfg, "constants.A1", consts.A1);
    consts.A2 = get_double(prior_cfg, "constants.A2", consts.A2);
    consts.A3 = get_double(prior_cfg, "constants.A3", consts.A3);
    consts.K = get_double(prior_cfg, "constants.K", consts.K);
    consts.M1 = get_double(prior_cfg, "constants.M1", consts.M1);
    consts.M2 = get_double(prior_cfg, "constants.M2", consts.M2);
    consts.M3 = get_double(prior_cfg, "constants.M3", consts.M3);
    consts.eta = get_double(prior_cfg, "constants.eta", consts.eta);

    std::filesystem::create_directories(g.out_dir);
    const std::string models_path = g.out_dir + "/models.csv";
    const std::string summary_path = g.out_dir + "/summary.csv";
    const std::uint64_t seed = g.seed_given ? g.seed : 7;

    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::string lambda_method = "-";
    double z0n = compute_z0n(prior.spike, inst.n);
    double eps = std::numeric_limits<double>::quiet_NaN();
    if (inst.truth) {
        const int s = inst.truth->xi_star.size();
        const int t = std::max(1, static_cast<int>(std::floor((consts.K + 1.0) * s)));
        eps = epsilon_n(inst.n, inst.p, std::max(1, s));
        try {
            lambda = muev(inst.X, inst.truth->xi_star, t).value;
            lambda_method = "enumerated";
        } catch (const EnumerationBudgetError&) {
            lambda = muev_sampled(inst.X, inst.truth->xi_star, t, 500,
                                  derive_seed(seed, 0x3A3B))
                         .value;
            lambda_method = "sampled";
        }
    }

    PosteriorSummary summary;
    bool have_summary = false;
    if (mode == "exact") {
        ModelPosterior post = exact_posterior(inst, prior, max_size);
        CsvWriter writer(models_path, {"model", "size", "log_prior", "log_evidence", "mass"});
        for (const ModelEntry& entry : post.sorted_entries()) {
            std::string cell = entry.xi.empty() ? "-" : "";
            for (int j : entry.xi.members()) {
                if (!cell.empty() && cell != "-") cell += '|';
                cell += std::to_string(j);
            }
            writer.write_row({cell, std::to_string(entry.xi.size()), fmt_g(entry.log_prior),
                              fmt_g(entry.log_evidence), fmt_g(entry.mass)});
        }
        writer.close();
        std::printf("exact posterior: %zu models (+%llu rank-deficient skipped), truncation "
                    "bound %s -> %s\n",
                    post.entries.size(),
                    static_cast<unsigned long long>(post.num_rank_deficient),
                    fmt_g(post.truncated_mass_bound, 3).c_str(), models_path.c_str());
        if (inst.truth) {
            SummaryOptions opts;
            opts.seed = derive_seed(seed, 0x5C11);
            summary = summarize(post, inst, prior, consts, lambda, z0n, opts);
            have_summary = true;
        }
    } else if (mode == "mcmc") {
        SamplerConfig sc;
        sc.sweeps = sweeps;
        sc.burn_in = burn_in;
        sc.thin = thin;
        sc.init = init == "truth"    ? SamplerConfig::Init::Truth
                  : init == "screen" ? SamplerConfig::Init::Screen
                                     : SamplerConfig::Init::Empty;
        sc.seed = derive_seed(seed, 0x6D22);
        ChainResult chain = mcmc_sample(inst, prior, sc);
        auto freq = model_frequencies(chain.states);
        std::vector<std::pair<ModelIndex, double>> items(freq.begin(), freq.end());
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        CsvWriter writer(models_path, {"model", "size", "freq"});
        for (const auto& [xi, f] : items) {
            std::string cell = xi.empty() ? "-" : "";
            for (int j : xi.members()) {
                if (!cell.empty() && cell != "-") cell += '|';
                cell += std::to_string(j);
            }
            writer.write_row({cell, std::to_string(xi.size()), fmt_f(f, 4)});
        }
        writer.close();
        std::printf("chain: %zu kept states, accept add/delete/swap = %s/%s/%s -> %s\n",
                    chain.states.size(), fmt_f(chain.accept_rate_add, 3).c_str(),
                    fmt_f(chain.accept_rate_delete, 3).c_str(),
                    fmt_f(chain.accept_rate_swap, 3).c_str(), models_path.c_str());
        if (inst.truth) {
            summary = summarize(chain, inst, consts, lambda, z0n);
            have_summary = true;
        }
    } else {
        throw ConfigError("--mode must be exact or mcmc");
    }

    if (have_summary) {
        CsvWriter writer(summary_path,
                         {"mode", "n", "p", "s", "lambda", "lambda_method", "eps_n", "z0n",
                          "prob_true_model", "freq_sigma", "freq_overfit", "freq_supset",
                          "freq_spike", "freq_l2_full", "freq_l2_restricted", "theta_hat",
                          "theta_hat_supset", "theta_tilde", "l2_error_post_mean", "ess"});
        const double l2 = (summary.post_mean_beta - inst.truth->beta_star).norm();
        writer.write_row({mode, std::to_string(inst.n), std::to_string(inst.p),
                          std::to_string(inst.truth->xi_star.size()), fmt_g(lambda),
                          lambda_method, fmt_g(eps), fmt_g(z0n),
                          fmt_f(summary.prob_true_model, 4), fmt_f(summary.freq_sigma, 4),
                          fmt_f(summary.freq_overfit, 4), fmt_f(summary.freq_supset, 4),
                          fmt_f(summary.freq_spike, 4), fmt_f(summary.freq_l2_full, 4),
                          fmt_f(summary.freq_l2_restricted, 4),
                          fmt_f(summary.freq_theta_hat, 4),
                          fmt_f(summary.freq_theta_hat_supset, 4),
                          fmt_f(summary.freq_theta_tilde, 4), fmt_g(l2),
                          fmt_g(summary.ess)});
        writer.close();
        std::printf("summary -> %s\n", summary_path.c_str());
    }
    return 0;
}

int run_make_instance(const std::string& out_file, int n, int p, int s, double signal,
                      const std::string& signal_mode, double sigma_star,
                      const std::string& design_text, std::uint64_t seed) {
    DesignSpec design = DesignSpec::parse(design_text);
    double magnitude = signal;
    if (signal_mode == "rate") {
        magnitude = signal * sigma_star * std::sqrt(std::log(static_cast<double>(p)) / n);
    } else if (signal_mode != "absolute") {
        throw ConfigError("make-instance --signal-mode must be absolute or rate");
    }
    ProblemInstance inst = generate_instance(n, p, s, magnitude, sigma_star, design, seed);
    save_instance(inst, out_file);
    std::printf("instance n=%d p=%d s=%d signal=%s -> %s\n", n, p, s,
                fmt_g(magnitude, 6).c_str(), out_file.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spike-and-slab regression workbench: posteriors, eigenvalue audits, and "
                 "bound checks"};
    app.require_subcommand(1);
    app.fallthrough(true);  // lets --out/--seed/... appear after the subcommand
    app.set_version_flag("--version", std::string("ssreg ") + kToolVersion);

    GlobalFlags g;
    app.add_option("--config", g.config_path, "structured config file for study commands");
    app.add_option("--out", g.out_dir, "output directory (default .)");
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed override");
    auto* workers_opt =
        app.add_option("--workers", g.workers, "worker threads for enumeration and studies");

    app.add_subcommand("contract-study", "posterior concentration across an (n,p,s) grid");
    app.add_subcommand("select-study",
                       "true-model recovery with paired above/below beta-min signal arms");
    app.add_subcommand("audit-prior", "prior-assumption clause checks across the grid");

    auto* eig = app.add_subcommand(
        "audit-eigen", "local eigenvalue functionals (grid mode or --matrix direct mode)");
    std::string eig_matrix, eig_xi = "";
    int eig_t = 0;
    double eig_alpha = 1.0;
    eig->add_option("--matrix", eig_matrix, "design matrix CSV (direct mode)");
    eig->add_option("--xi-star", eig_xi, "true support, comma separated (direct mode)");
    eig->add_option("--t", eig_t, "order of the functionals (direct mode)");
    eig->add_option("--alpha", eig_alpha, "cone parameter for the restricted eigenvalue");

    auto* bounds = app.add_subcommand("bounds", "evaluate one analytic bound against its oracle");
    std::string bounds_check, bounds_params, bounds_prior;
    bounds->add_option("--check", bounds_check, "chi2 | pelekis | ratio | rn | omega")
        ->required();
    bounds->add_option("--params", bounds_params, "comma separated key=value inputs");
    bounds->add_option("--prior", bounds_prior, "prior config file (rn check)");

    auto* post = app.add_subcommand("posterior", "fit one saved instance and write model table");
    std::string post_instance, post_prior, post_mode = "exact", post_init = "empty";
    int post_max_size = 6, post_sweeps = 100000, post_burn = 20000, post_thin = 10;
    post->add_option("--instance", post_instance, "instance bundle path")->required();
    post->add_option("--prior", post_prior, "prior config file");
    post->add_option("--mode", post_mode, "exact | mcmc");
    post->add_option("--max-size", post_max_size, "exact mode: largest model size enumerated");
    post->add_option("--sweeps", post_sweeps, "mcmc mode: total sweeps");
    post->add_option("--burn-in", post_burn, "mcmc mode: burn-in sweeps");
    post->add_option("--thin", post_thin, "mcmc mode: keep every k-th state");
    post->add_option("--init", post_init, "mcmc start: empty | truth | screen");

    auto* mk = app.add_subcommand("make-instance", "generate and save a synthetic instance");
    std::string mk_out = "instance.txt", mk_design = "iid-gaussian",
                mk_signal_mode = "absolute";
    int mk_n = 100, mk_p = 20, mk_s = 3;
    double mk_signal = 1.0, mk_sigma = 1.0;
    std::uint64_t mk_seed = 1;
    mk->add_option("--n", mk_n, "rows");
    mk->add_option("--p", mk_p, "columns");
    mk->add_option("--s", mk_s, "true support size");
    mk->add_option("--signal", mk_signal, "coefficient magnitude");
    mk->add_option("--signal-mode", mk_signal_mode, "absolute | rate");
    mk->add_option("--sigma-star", mk_sigma, "noise level");
    mk->add_option("--design", mk_design,
                   "iid-gaussian | equicorrelated:RHO | duplicate-column-demo");
    mk->add_option("--instance-seed", mk_seed, "generation seed");
    mk->add_option("--out-file", mk_out, "bundle path to write");

    CLI11_PARSE(app, argc, argv);
    g.seed_given = seed_opt->count() > 0;
    g.workers_given = workers_opt->count() > 0;

    const std::string command = join_args(argc, argv);
    try {
        if (app.got_subcommand("contract-study")) return run_row_study(g, "contract", command);
        if (app.got_subcommand("select-study")) return run_row_study(g, "select", command);
        if (app.got_subcommand("audit-prior")) return run_audit(g, "audit-prior", command);
        if (app.got_subcommand("audit-eigen")) {
            if (!eig_matrix.empty()) {
                if (eig_t < 1) throw ConfigError("audit-eigen --matrix needs --t >= 1");
                return run_eigen_direct(eig_matrix, eig_xi, eig_t, eig_alpha, g.workers);
            }
            return run_audit(g, "audit-eigen", command);
        }
        if (app.got_subcommand("bounds")) {
            return run_bounds(g, bounds_check, bounds_params, bounds_prior);
        }
        if (app.got_subcommand("posterior")) {
            return run_posterior(g, post_instance, post_prior, post_mode, post_max_size,
                                 post_sweeps, post_burn, post_thin, post_init);
        }
        if (app.got_subcommand("make-instance")) {
            const std::uint64_t seed = g.seed_given ? g.seed : mk_seed;
            return run_make_instance(mk_out, mk_n, mk_p, mk_s, mk_signal, mk_signal_mode,
                                     mk_sigma, mk_design, seed);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
