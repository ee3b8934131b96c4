#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ssreg/config.hpp"
#include "ssreg/csv.hpp"
#include "ssreg/errors.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/studies.hpp"
#include "test_util.hpp"

using namespace ssreg;

namespace {

namespace fs = std::filesystem;

//! Fresh empty directory under the test working directory.
std::string scratch_dir(const std::string& name) {
    fs::path dir = fs::path("harness_scratch") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(bool(out));
    out << text;
}

template <typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

//! Runs a shell command, captures combined output, returns the exit status.
int run_command(const std::string& cmd, std::string* output = nullptr) {
    static int counter = 0;
    fs::create_directories("harness_scratch");
    const std::string log = "harness_scratch/cmd_" + std::to_string(counter++) + ".log";
    const int status = std::system((cmd + " > " + log + " 2>&1").c_str());
    if (output) *output = slurp(log);
    return status;
}

//! Minimal exact-mode study configuration shared by several cases.
ExperimentConfig tiny_contract_config() {
    ExperimentConfig cfg;
    cfg.study = "contract";
    cfg.grid = {{40, 6, 2}};
    cfg.design = DesignSpec::parse("iid-gaussian");
    cfg.signal_mode = "rate";
    cfg.signal = 8.0;
    cfg.replications = 3;
    cfg.master_seed = 11;
    cfg.mode = "exact";
    cfg.max_size = 6;
    cfg.draws_per_model = 300;
    cfg.prior_section = {{"variance.kind", "inverse-gamma"},
                         {"variance.a", "2"},
                         {"variance.b", "1"},
                         {"selection.kind", "bernoulli"},
                         {"spike.kind", "dirac"},
                         {"slab.kind", "gaussian"},
                         {"slab.scale", "25"}};
    return cfg;
}

std::string joined_cells(const std::vector<StudyRow>& rows) {
    std::string out;
    for (const StudyRow& row : rows) {
        for (const std::string& cell : study_row_cells(row)) {
            out += cell;
            out += ',';
        }
        out += '\n';
    }
    return out;
}

} // namespace

TEST_CASE("config text flattens sections into dotted keys") {
    const std::string text =
        "# a comment on its own line\n"
        "top = 1\n"
        "\n"
        "[prior]\n"
        "variance.kind = inverse-gamma   # trailing comment\n"
        "slab.scale = 2.5\n"
        "[sampler]\n"
        "  sweeps=  100  \n"
        "[   spaced section  ]\n"
        "k = v\n";
    ConfigMap cfg = parse_config_text(text);
    CHECK(cfg.size() == 5);
    CHECK(get_string(cfg, "top", "") == "1");
    CHECK(get_string(cfg, "prior.variance.kind", "") == "inverse-gamma");
    CHECK(get_string(cfg, "prior.slab.scale", "") == "2.5");
    CHECK(get_string(cfg, "sampler.sweeps", "") == "100");
    CHECK(get_string(cfg, "spaced section.k", "") == "v");
    CHECK(has_key(cfg, "prior.slab.scale"));
    CHECK(!has_key(cfg, "slab.scale"));

    // later assignments win
    ConfigMap dup = parse_config_text("a = 1\na = 2\n");
    CHECK(dup.size() == 1);
    CHECK(get_string(dup, "a", "") == "2");

    // a fully commented / blank document is empty, not an error
    CHECK(parse_config_text("# nothing\n\n   \n").empty());
}

TEST_CASE("config parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_config_text("x 1\n"), ConfigError);
    std::string msg = thrown_message([] { parse_config_text("ok = 1\nbroken line\n"); });
    CHECK(contains(msg, "line 2"));
    CHECK(contains(msg, "expected key = value"));

    msg = thrown_message([] { parse_config_text("[prior\n"); });
    CHECK(contains(msg, "line 1"));
    CHECK(contains(msg, "section"));

    msg = thrown_message([] { parse_config_text("a = 1\nb = 2\n = 3\n"); });
    CHECK(contains(msg, "line 3"));
    CHECK(contains(msg, "empty key"));

    CHECK_THROWS_AS(load_config("harness_scratch/does_not_exist.ini"), ConfigError);
}

TEST_CASE("typed accessors fall back on missing keys and name bad ones") {
    ConfigMap cfg = parse_config_text(
        "d = 2.5\ni = -3\nu = 18446744073709551615\nbt = yes\nbf = off\nbad = 12q\n");
    CHECK(get_double(cfg, "d", 0.0) == doctest::Approx(2.5));
    CHECK(get_int(cfg, "i", 0) == -3);
    CHECK(get_u64(cfg, "u", 0) == 18446744073709551615ULL);
    CHECK(get_bool(cfg, "bt", false));
    CHECK(!get_bool(cfg, "bf", true));
    CHECK(get_bool(cfg, "b1", true));  // missing -> fallback

    CHECK(get_double(cfg, "absent", 7.25) == doctest::Approx(7.25));
    CHECK(get_int(cfg, "absent", 9) == 9);
    CHECK(get_u64(cfg, "absent", 9) == 9);
    CHECK(get_string(cfg, "absent", "fb") == "fb");

    for (const char* key : {"bad"}) {
        std::string msg = thrown_message([&] { get_double(cfg, key, 0.0); });
        CHECK(contains(msg, key));
        CHECK(contains(msg, "not a number"));
        CHECK_THROWS_AS(get_int(cfg, key, 0), ConfigError);
        CHECK_THROWS_AS(get_u64(cfg, key, 0), ConfigError);
        CHECK_THROWS_AS(get_bool(cfg, key, false), ConfigError);
    }
    CHECK_THROWS_AS(get_int(cfg, "d", 0), ConfigError);  // 2.5 is not an integer

    ConfigMap prior = section_of(cfg, "d");  // no "d." keys -> empty
    CHECK(prior.empty());
    ConfigMap nested = parse_config_text("[prior]\nslab.scale = 2\nspike.kind = dirac\n");
    ConfigMap inner = section_of(nested, "prior");
    CHECK(inner.size() == 2);
    CHECK(get_string(inner, "slab.scale", "") == "2");
    ConfigMap deeper = section_of(nested, "prior.slab");
    CHECK(deeper.size() == 1);
    CHECK(get_string(deeper, "scale", "") == "2");
}

TEST_CASE("experiment config picks up defaults, overrides, and validates") {
    ExperimentConfig defaults = ExperimentConfig::from_config(ConfigMap{});
    CHECK(defaults.grid.empty());
    CHECK(defaults.signal_mode == "rate");
    CHECK(defaults.signal == doctest::Approx(10.0));
    CHECK(defaults.sigma_star == doctest::Approx(1.0));
    CHECK(defaults.replications == 1);
    CHECK(defaults.master_seed == 1);
    CHECK(defaults.mode == "auto");
    CHECK(defaults.max_size == 6);
    CHECK(defaults.workers == 1);
    CHECK(defaults.consts.K == doctest::Approx(2.0));

    ConfigMap cfg = parse_config_text(
        "grid = 40,6,2; 80, 12, 3\n"
        "design = equicorrelated:0.25\n"
        "replications = 4\n"
        "seed = 99\n"
        "sigma_star = 2\n"
        "[signal]\n"
        "mode = beta-min\n"
        "value = 2.5\n"
        "below_factor = 0.2\n"
        "[constants]\n"
        "K = 3\n"
        "eta = 0.5\n"
        "[inference]\n"
        "mode = exact\n"
        "max_size = 5\n"
        "draws_per_model = 123\n"
        "[sampler]\n"
        "sweeps = 4242\n"
        "burn_in = 442\n"
        "init = screen\n"
        "[lambda]\n"
        "samples = 77\n"
        "[eigen]\n"
        "alpha = 1.5\n"
        "t = 4\n"
        "[prior]\n"
        "slab.kind = laplace\n"
        "slab.scale = 3\n");
    ExperimentConfig exp = ExperimentConfig::from_config(cfg);
    REQUIRE(exp.grid.size() == 2);
    CHECK(exp.grid[0].n == 40);
    CHECK(exp.grid[0].p == 6);
    CHECK(exp.grid[0].s == 2);
    CHECK(exp.grid[1].n == 80);
    CHECK(exp.grid[1].p == 12);
    CHECK(exp.grid[1].s == 3);
    CHECK(exp.design.to_string() == "equicorrelated:0.25");
    CHECK(exp.signal_mode == "beta-min");
    CHECK(exp.signal == doctest::Approx(2.5));
    CHECK(exp.below_factor == doctest::Approx(0.2));
    CHECK(exp.sigma_star == doctest::Approx(2.0));
    CHECK(exp.replications == 4);
    CHECK(exp.master_seed == 99);
    CHECK(exp.consts.K == doctest::Approx(3.0));
    CHECK(exp.consts.eta == doctest::Approx(0.5));
    CHECK(exp.mode == "exact");
    CHECK(exp.max_size == 5);
    CHECK(exp.draws_per_model == 123);
    CHECK(exp.sampler.sweeps == 4242);
    CHECK(exp.sampler.burn_in == 442);
    CHECK(exp.sampler.init == SamplerConfig::Init::Screen);
    CHECK(exp.lambda_samples == 77);
    CHECK(exp.alpha == doctest::Approx(1.5));
    CHECK(exp.eigen_t == 4);
    CHECK(get_string(exp.prior_section, "slab.kind", "") == "laplace");
    CHECK(get_string(exp.prior_section, "slab.scale", "") == "3");
    exp.study = "contract";
    CHECK_NOTHROW(exp.validate());

    auto expect_invalid = [](auto mutate, const std::string& needle) {
        ExperimentConfig bad = tiny_contract_config();
        mutate(bad);
        std::string msg = thrown_message([&] { bad.validate(); });
        INFO("expected a complaint about: " << needle << ", got: " << msg);
        CHECK(contains(msg, needle));
    };
    expect_invalid([](ExperimentConfig& c) { c.grid.clear(); }, "grid");
    expect_invalid([](ExperimentConfig& c) { c.grid = {{1, 4, 1}}; }, "grid point");
    expect_invalid([](ExperimentConfig& c) { c.grid = {{40, 6, 7}}; }, "grid point");
    expect_invalid([](ExperimentConfig& c) { c.replications = 0; }, "replications");
    expect_invalid([](ExperimentConfig& c) { c.mode = "guess"; }, "inference.mode");
    expect_invalid([](ExperimentConfig& c) { c.signal_mode = "loud"; }, "signal.mode");
    expect_invalid(
        [](ExperimentConfig& c) {
            c.study = "select";
            c.signal_mode = "rate";
        },
        "beta-min");
    expect_invalid([](ExperimentConfig& c) { c.sigma_star = 0.0; }, "sigma_star");
    expect_invalid([](ExperimentConfig& c) { c.max_size = -1; }, "max_size");
    expect_invalid([](ExperimentConfig& c) { c.draws_per_model = 0; }, "draws_per_model");
    expect_invalid([](ExperimentConfig& c) { c.lambda_samples = 0; }, "lambda.samples");
    expect_invalid([](ExperimentConfig& c) { c.workers = 0; }, "workers");
    expect_invalid([](ExperimentConfig& c) { c.consts.K = -1.0; }, "K");
    expect_invalid([](ExperimentConfig& c) { c.sampler.sweeps = 0; }, "sweeps");

    CHECK_THROWS_AS(ExperimentConfig::from_config(parse_config_text("grid = 40,6\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse_config_text("grid = a,b,c\n")),
                    ConfigError);
}

TEST_CASE("the result schema matches the committed column list") {
    std::ifstream in(test_util::data_path("study_row_columns.txt"));
    REQUIRE(bool(in));
    std::vector<std::string> frozen;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) frozen.push_back(line);
    }
    const std::vector<std::string>& live = study_row_columns();
    REQUIRE(frozen.size() == live.size());
    for (std::size_t i = 0; i < frozen.size(); ++i) {
        INFO("column " << i);
        CHECK(frozen[i] == live[i]);
    }
}

TEST_CASE("result cells format probabilities at four decimals and isolate failures") {
    StudyRow row;
    row.study = "contract";
    row.n = 40;
    row.p = 6;
    row.s = 2;
    row.design = "iid-gaussian";
    row.replication = 1;
    row.seed = 424242;
    row.lambda = 0.512345678901234;
    row.lambda_method = "enumerated";
    row.eps_n = 0.299313;
    row.r_n = 0.25;
    row.signal = 1.5;
    row.sigma_star = 1.0;
    row.summary.prob_true_model = 0.123456;
    row.summary.freq_sigma = 1.0;
    row.summary.freq_theta_tilde = 0.98765;
    row.l2_error_post_mean = 0.0123456789;
    row.summary.ess = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::string> cells = study_row_cells(row);
    REQUIRE(cells.size() == study_row_columns().size());
    CHECK(cells[0] == "contract");
    CHECK(cells[1] == "40");
    CHECK(cells[5] == "main");
    CHECK(cells[7] == "424242");
    CHECK(cells[9] == "enumerated");
    const int prob_col = 14;  // prob_true_model
    CHECK(cells[prob_col] == "0.1235");
    CHECK(cells[prob_col + 1] == "1.0000");
    CHECK(cells[23] == "0.9877");  // theta_tilde rounds up
    CHECK(cells[25] == "nan");     // exact mode has no chain, so no ess
    CHECK(cells[26].empty());

    // a failed replication blanks the measured cells but keeps its identity
    row.error = "bad, thing\nsecond line";
    cells = study_row_cells(row);
    CHECK(cells[prob_col] == "nan");
    CHECK(cells[23] == "nan");
    CHECK(cells[24] == "nan");  // l2 error
    CHECK(cells[8] == fmt_g(row.lambda));  // design-level facts survive
    CHECK(cells[26] == "bad; thing;second line");
    CHECK(!contains(cells[26], ","));
    CHECK(!contains(cells[26], "\n"));
}

TEST_CASE("a small exact study runs deterministically across workers and reruns") {
    ExperimentConfig cfg = tiny_contract_config();
    std::vector<StudyRow> rows = run_contraction_study(cfg);
    REQUIRE(rows.size() == 3);
    for (int i = 0; i < 3; ++i) {
        const StudyRow& row = rows[i];
        CHECK(row.study == "contract");
        CHECK(row.n == 40);
        CHECK(row.p == 6);
        CHECK(row.s == 2);
        CHECK(row.design == "iid-gaussian");
        CHECK(row.arm == "main");
        CHECK(row.replication == i);
        CHECK(row.seed != 0);
        CHECK(row.error.empty());
        CHECK(row.lambda > 0.0);
        CHECK(row.lambda_method == "enumerated");
        CHECK(row.eps_n ==
              doctest::Approx(std::sqrt(2.0 * std::log(6.0) / 40.0)).epsilon(1e-12));
        CHECK(std::isfinite(row.r_n));
        CHECK(row.signal ==
              doctest::Approx(8.0 * std::sqrt(std::log(6.0) / 40.0)).epsilon(1e-12));
        CHECK(row.summary.prob_true_model >= 0.0);
        CHECK(row.summary.prob_true_model <= 1.0);
        CHECK(row.summary.freq_overfit >= row.summary.freq_theta_hat - 1e-12);
        CHECK(row.l2_error_post_mean >= 0.0);
        CHECK(std::isfinite(row.l2_error_post_mean));
        CHECK(std::isnan(row.summary.ess));  // exact mode
    }
    // replications draw different data
    CHECK(rows[0].seed != rows[1].seed);
    CHECK(rows[0].l2_error_post_mean != rows[1].l2_error_post_mean);

    // rerun: byte-identical cells
    CHECK(joined_cells(run_contraction_study(cfg)) == joined_cells(rows));

    // worker count must not change results, only scheduling
    ExperimentConfig par = cfg;
    par.workers = 2;
    CHECK(joined_cells(run_contraction_study(par)) == joined_cells(rows));
    par.workers = 3;
    CHECK(joined_cells(run_contraction_study(par)) == joined_cells(rows));

    // a different master seed must change the data
    ExperimentConfig other = cfg;
    other.master_seed = 12;
    CHECK(joined_cells(run_contraction_study(other)) != joined_cells(rows));
}

TEST_CASE("a non-conjugate prior fails row by row instead of aborting the study") {
    ExperimentConfig cfg = tiny_contract_config();
    cfg.prior_section["slab.kind"] = "laplace";
    cfg.prior_section["slab.scale"] = "1";
    cfg.mode = "exact";  // laplace slab has no closed-form evidence
    std::vector<StudyRow> rows;
    CHECK_NOTHROW(rows = run_contraction_study(cfg));
    REQUIRE(rows.size() == 3);
    for (const StudyRow& row : rows) {
        CHECK(!row.error.empty());
        std::vector<std::string> cells = study_row_cells(row);
        CHECK(cells[14] == "nan");  // prob_true_model
        CHECK(cells[24] == "nan");  // l2 error
        CHECK(!cells[26].empty());
    }
}

TEST_CASE("study csv output round-trips and aggregates by grid point") {
    const std::string dir = scratch_dir("roundtrip");
    ExperimentConfig cfg = tiny_contract_config();
    std::vector<StudyRow> rows = run_contraction_study(cfg);

    const std::string rows_path = dir + "/results.csv";
    write_study_rows(rows_path, rows);
    CsvTable table = read_csv_table(rows_path);
    REQUIRE(table.columns == study_row_columns());
    REQUIRE(table.rows.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> cells = study_row_cells(rows[i]);
        CHECK(table.rows[i] == cells);
        CHECK(table.num(i, "lambda") == doctest::Approx(rows[i].lambda).epsilon(1e-10));
        CHECK(table.cell(i, "study") == "contract");
    }
    CHECK(table.col("prob_true_model") == 14);
    CHECK(table.col("no_such_column") == -1);

    const std::string agg_path = dir + "/aggregate.csv";
    write_grid_aggregates(agg_path, rows);
    CsvTable agg = read_csv_table(agg_path);
    REQUIRE(agg.rows.size() == 1);  // one grid point, one arm
    CHECK(agg.cell(0, "study") == "contract");
    CHECK(agg.num(0, "n") == doctest::Approx(40));
    CHECK(agg.cell(0, "arm") == "main");
    CHECK(agg.num(0, "rows") == doctest::Approx(3));
    CHECK(agg.num(0, "errors") == doctest::Approx(0));
    CHECK(agg.cell(0, "rn_pass") == (rows[0].r_n < 1.0 ? "1" : "0"));

    double mean_prob = 0.0;
    std::vector<double> l2;
    for (const StudyRow& row : rows) {
        mean_prob += row.summary.prob_true_model;
        l2.push_back(row.l2_error_post_mean);
    }
    mean_prob /= static_cast<double>(rows.size());
    CHECK(agg.num(0, "mean_prob_true_model") == doctest::Approx(mean_prob).epsilon(5e-4));
    std::sort(l2.begin(), l2.end());
    CHECK(agg.num(0, "median_l2_error") == doctest::Approx(l2[1]).epsilon(1e-9));
    const double bound = 3.0 * rows[0].sigma_star * rows[0].eps_n / std::sqrt(rows[0].lambda);
    CHECK(agg.num(0, "l2_bound") == doctest::Approx(bound).epsilon(1e-9));
    int hits = 0;
    for (double v : l2) hits += v <= bound;
    CHECK(agg.num(0, "frac_l2_le_bound") ==
          doctest::Approx(static_cast<double>(hits) / 3.0).epsilon(5e-4));

    // grouping: a second arm lands in its own aggregate row
    std::vector<StudyRow> two_arms = rows;
    for (StudyRow row : rows) {
        row.arm = "below";
        two_arms.push_back(row);
    }
    write_grid_aggregates(agg_path, two_arms);
    agg = read_csv_table(agg_path);
    REQUIRE(agg.rows.size() == 2);
    CHECK(agg.cell(0, "arm") == "main");
    CHECK(agg.cell(1, "arm") == "below");
}

TEST_CASE("prior and eigen audits emit one row per grid point") {
    const std::string dir = scratch_dir("audits");
    ExperimentConfig cfg = tiny_contract_config();
    cfg.study = "audit";
    cfg.grid = {{40, 6, 2}, {60, 8, 2}};
    cfg.audit_t_max = 6;

    const std::string prior_path = dir + "/audit_prior.csv";
    run_prior_audit(cfg, prior_path);
    CsvTable prior = read_csv_table(prior_path);
    REQUIRE(prior.rows.size() == 2);
    CHECK(prior.num(0, "p") == doctest::Approx(6));
    CHECK(prior.num(1, "p") == doctest::Approx(8));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(prior.cell(i, "error").empty());
        CHECK(prior.num(i, "z0n") == doctest::Approx(0.0));  // dirac spike
        CHECK(prior.num(i, "pi_true") > 0.0);
        CHECK(prior.cell(i, "a_positive") == "1");
    }

    const std::string eigen_path = dir + "/audit_eigen.csv";
    run_eigen_audit(cfg, eigen_path);
    CsvTable eig = read_csv_table(eigen_path);
    REQUIRE(eig.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(eig.cell(i, "error").empty());
        CHECK(eig.num(i, "t") == doctest::Approx(6));  // floor((K+1) s) with K = 2
        const double muev_v = eig.num(i, "muev");
        const double msev_v = eig.num(i, "msev");
        const double mrev_v = eig.num(i, "mrev");
        CHECK(muev_v >= msev_v - 1e-9);
        CHECK(msev_v >= mrev_v - 1e-6);
        CHECK(eig.cell(i, "ordering_pass") == "1");
        CHECK(eig.num(i, "lambda") == doctest::Approx(muev_v).epsilon(1e-12));
    }

    // determinism: the audit files regenerate byte for byte
    const std::string again = dir + "/audit_eigen_again.csv";
    run_eigen_audit(cfg, again);
    CHECK(slurp(again) == slurp(eigen_path));
}

TEST_CASE("manifest digests track file content") {
    const std::string dir = scratch_dir("manifest");
    spit(dir + "/a.csv", "x,y\n1,2\n");
    spit(dir + "/b.csv", "x,y\n1,2\n");
    spit(dir + "/c.csv", "x,y\n1,3\n");
    const std::string da = file_digest(dir + "/a.csv");
    CHECK(da == file_digest(dir + "/a.csv"));
    CHECK(da == file_digest(dir + "/b.csv"));  // digests depend on content only
    CHECK(da != file_digest(dir + "/c.csv"));
    CHECK(da.size() == 16);
    CHECK(da.find_first_not_of("0123456789abcdef") == std::string::npos);

    write_run_manifest(dir + "/run_manifest.txt",
                       {{"tool", "ssreg"}, {"rows", "3"}, {"output", "a.csv " + da}});
    const std::string text = slurp(dir + "/run_manifest.txt");
    CHECK(contains(text, "tool: ssreg"));
    CHECK(contains(text, "rows: 3"));
    CHECK(contains(text, da));
}

TEST_CASE("the command line tool checks bounds and audits designs") {
    const std::string dir = scratch_dir("cli_bounds");
    const std::string cli = SSREG_CLI_PATH;

    std::string out;
    REQUIRE(run_command(cli + " --version", &out) == 0);
    CHECK(contains(out, kToolVersion));

    REQUIRE(run_command(cli + " bounds --check chi2 --params d=4,t=9", &out) == 0);
    CHECK(contains(out, "check,context,bound,exact,holds"));
    CHECK(contains(out, "chi2-tail"));
    CHECK(contains(out, ",1\n"));

    REQUIRE(run_command(cli + " bounds --check chi2 --params n=100,d=5,eps=0.5", &out) == 0);
    CHECK(contains(out, "chi2-norm"));

    // the binomial crossing claim is reported, never asserted
    REQUIRE(run_command(cli + " bounds --check pelekis --params p=10,mu=0.1,t=2", &out) == 0);
    CHECK(contains(out, "(reported)"));

    REQUIRE(run_command(
                cli + " bounds --check ratio --params t_minus_s=1,n=100,p=20,lambda=0.5," +
                    "eta=0.5,sup_h1=0.00797885",
                &out) == 0);
    CHECK(contains(out, "ratio,"));

    spit(dir + "/prior.ini",
         "[prior]\nslab.kind = gaussian\nslab.scale = 25\nspike.kind = dirac\n");
    REQUIRE(run_command(cli + " bounds --check rn --prior " + dir +
                            "/prior.ini --params n=400,p=400,s=3,lambda=0.5,eta=0.1,K=2",
                        &out) == 0);
    CHECK(contains(out, "rn,"));
    CHECK(contains(out, "slab_factor="));

    // a missing parameter is a usage error, not a crash
    CHECK(run_command(cli + " bounds --check chi2 --params d=4", &out) != 0);
    CHECK(contains(out, "t="));

    // eigen audit, direct matrix mode
    Eigen::MatrixXd X = test_util::equicorrelated_design(40, 5, 0.3);
    write_matrix_csv(dir + "/design.csv", X);
    REQUIRE(run_command(cli + " audit-eigen --matrix " + dir +
                            "/design.csv --xi-star 1,2 --t 3 --alpha 1",
                        &out) == 0);
    std::istringstream lines(out);
    std::string header, data;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, data));
    CHECK(header ==
          "n,p,xi_star,t,alpha,muev,muev_witness,msev,msev_witness,mnev,mnev_witness,"
          "mnev_premise,mrev,mrev_method,mrev_grid_deg,ordering_pass");
    std::vector<std::string> cells = split_csv_line(data);
    REQUIRE(cells.size() == 16);
    CHECK(cells[0] == "40");
    CHECK(cells[1] == "5");
    CHECK(cells[2] == "1|2");
    CHECK(cells[3] == "3");
    CHECK(std::stod(cells[5]) > 0.0);                      // muev
    CHECK(std::stod(cells[5]) >= std::stod(cells[7]));     // muev >= msev
    CHECK(std::stod(cells[7]) >= std::stod(cells[12]) - 1e-6);  // msev >= mrev
    CHECK(cells[13] == "dense-grid");                      // p = 5 enumerates exactly
    CHECK(cells[15] == "1");
}

TEST_CASE("the command line tool fits a saved instance end to end") {
    const std::string dir = scratch_dir("cli_posterior");
    const std::string cli = SSREG_CLI_PATH;
    spit(dir + "/prior.ini",
         "[prior]\n"
         "variance.kind = inverse-gamma\n"
         "variance.a = 2\n"
         "variance.b = 1\n"
         "selection.kind = bernoulli\n"
         "spike.kind = dirac\n"
         "slab.kind = gaussian\n"
         "slab.scale = 25\n");

    std::string out;
    REQUIRE(run_command(cli + " make-instance --n 60 --p 6 --s 2 --signal 8" +
                            " --signal-mode rate --instance-seed 5 --out-file " + dir +
                            "/inst.csv",
                        &out) == 0);
    CHECK(contains(out, "instance n=60 p=6 s=2"));

    REQUIRE(run_command(cli + " posterior --instance " + dir + "/inst.csv --prior " + dir +
                            "/prior.ini --mode exact --max-size 6 --out " + dir,
                        &out) == 0);
    CHECK(contains(out, "exact posterior"));
    CsvTable models = read_csv_table(dir + "/models.csv");
    REQUIRE(models.rows.size() > 1);
    double total = 0.0;
    for (std::size_t i = 0; i < models.rows.size(); ++i) total += models.num(i, "mass");
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    // sorted by mass, largest first
    CHECK(models.num(0, "mass") >= models.num(1, "mass"));

    CsvTable summary = read_csv_table(dir + "/summary.csv");
    REQUIRE(summary.rows.size() == 1);
    CHECK(summary.cell(0, "mode") == "exact");
    CHECK(summary.num(0, "lambda") > 0.0);
    CHECK(summary.num(0, "prob_true_model") >= 0.0);
    CHECK(summary.num(0, "prob_true_model") <= 1.0);
    CHECK(summary.cell(0, "ess") == "nan");

    // the chain path writes frequency tables and a finite ess
    REQUIRE(run_command(cli + " posterior --instance " + dir + "/inst.csv --prior " + dir +
                            "/prior.ini --mode mcmc --sweeps 4000 --burn-in 1000" +
                            " --init screen --out " + dir,
                        &out) == 0);
    CHECK(contains(out, "chain:"));
    CsvTable freq = read_csv_table(dir + "/models.csv");
    REQUIRE(freq.rows.size() >= 1);
    double fsum = 0.0;
    for (std::size_t i = 0; i < freq.rows.size(); ++i) fsum += freq.num(i, "freq");
    CHECK(fsum == doctest::Approx(1.0).epsilon(0.01));  // four-decimal rounding
    summary = read_csv_table(dir + "/summary.csv");
    CHECK(summary.cell(0, "mode") == "mcmc");
    CHECK(std::stod(summary.cell(0, "ess")) > 1.0);

    // a bad mode is rejected with a usage error
    CHECK(run_command(cli + " posterior --instance " + dir + "/inst.csv --prior " + dir +
                          "/prior.ini --mode guess --out " + dir,
                      &out) != 0);
}

TEST_CASE("the command line tool reruns a study byte for byte") {
    const std::string dir = scratch_dir("cli_study");
    const std::string cli = SSREG_CLI_PATH;
    spit(dir + "/study.ini",
         "grid = 40,6,2\n"
         "design = iid-gaussian\n"
         "replications = 2\n"
         "seed = 11\n"
         "[signal]\n"
         "mode = rate\n"
         "value = 8\n"
         "[inference]\n"
         "mode = exact\n"
         "max_size = 6\n"
         "draws_per_model = 300\n"
         "[prior]\n"
         "variance.kind = inverse-gamma\n"
         "variance.a = 2\n"
         "variance.b = 1\n"
         "selection.kind = bernoulli\n"
         "spike.kind = dirac\n"
         "slab.kind = gaussian\n"
         "slab.scale = 25\n");

    std::string out;
    REQUIRE(run_command(cli + " contract-study --config " + dir + "/study.ini --out " + dir +
                            "/run_a",
                        &out) == 0);
    CHECK(contains(out, "contract study: 2 rows"));
    REQUIRE(fs::exists(dir + "/run_a/results.csv"));
    REQUIRE(fs::exists(dir + "/run_a/aggregate.csv"));
    REQUIRE(fs::exists(dir + "/run_a/run_manifest.txt"));

    CsvTable results = read_csv_table(dir + "/run_a/results.csv");
    REQUIRE(results.rows.size() == 2);
    CHECK(results.columns == study_row_columns());
    for (std::size_t i = 0; i < results.rows.size(); ++i) {
        CHECK(results.cell(i, "error").empty());
        CHECK(results.cell(i, "study") == "contract");
    }

    const std::string manifest = slurp(dir + "/run_a/run_manifest.txt");
    CHECK(contains(manifest, "tool: ssreg"));
    CHECK(contains(manifest, "version: " + std::string(kToolVersion)));
    CHECK(contains(manifest, "rows: 2"));
    CHECK(contains(manifest, "output: " + dir + "/run_a/results.csv"));
    CHECK(contains(manifest, "config_digest: " + file_digest(dir + "/study.ini")));

    // same seed, fresh directory: identical tables (manifests differ in wall time)
    REQUIRE(run_command(cli + " contract-study --config " + dir + "/study.ini --out " + dir +
                            "/run_b",
                        &out) == 0);
    CHECK(slurp(dir + "/run_b/results.csv") == slurp(dir + "/run_a/results.csv"));
    CHECK(slurp(dir + "/run_b/aggregate.csv") == slurp(dir + "/run_a/aggregate.csv"));

    // a seed override on the command line changes the data
    REQUIRE(run_command(cli + " contract-study --config " + dir + "/study.ini --seed 12" +
                            " --out " + dir + "/run_c",
                        &out) == 0);
    CHECK(slurp(dir + "/run_c/results.csv") != slurp(dir + "/run_a/results.csv"));

    // study commands refuse to run without a config
    CHECK(run_command(cli + " contract-study --out " + dir + "/run_d", &out) != 0);
    CHECK(contains(out, "--config"));
}
