// Command-line front end: simulate, solve, tune, bench, asweep, realdata,
// prox-check. Exit codes: 0 ok, 1 oracle violation, 2 usage/config error,
// 3 numerical failure.

#include "tl1mc/admm.hpp"
#include "tl1mc/core.hpp"
#include "tl1mc/errors.hpp"
#include "tl1mc/evaluation.hpp"
#include "tl1mc/format.hpp"
#include "tl1mc/io.hpp"
#include "tl1mc/realdata.hpp"
#include "tl1mc/regularizers.hpp"
#include "tl1mc/synthetic.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tl1mc;

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// TL1MC_OUT_DIR overrides the default output directory.
fs::path default_out_dir()
{
    if (const char* env = std::getenv("TL1MC_OUT_DIR"); env != nullptr && *env != '\0') {
        return fs::path(env);
    }
    return fs::path("tl1mc-out");
}

fs::path resolve_dir(const std::string& flag)
{
    fs::path p = flag.empty() ? default_out_dir() : fs::path(flag);
    fs::create_directories(p);
    return p;
}

io::MatrixFormat format_of(const std::string& s)
{
    return s == "csv" ? io::MatrixFormat::Csv : io::MatrixFormat::Text;
}

json report_json(const SolveReport& r)
{
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"estimated_rank", r.estimated_rank},
            {"elapsed_seconds", r.elapsed_seconds},
            {"final_primal_residual", r.primal_residuals.empty() ? 0.0 : r.primal_residuals.back()},
            {"final_objective", r.objective_trace.empty() ? 0.0 : r.objective_trace.back()},
            {"primal_residuals", r.primal_residuals},
            {"objective_trace", r.objective_trace}};
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot write '" + path.string() + "'");
    }
    out << text;
}

// ---- simulate

struct SimulateArgs {
    int scheme = 1;
    Index m1 = 300;
    Index m2 = 300;
    Index rank = 5;
    double sr = 0.1;
    std::optional<double> snr;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& args)
{
    ScenarioSpec s;
    s.m1 = args.m1;
    s.m2 = args.m2;
    s.rank = args.rank;
    s.scheme = scheme_from_int(args.scheme);
    s.sampling_ratio = args.sr;
    s.snr_db = args.snr;
    s.seed = args.seed;
    const SyntheticInstance inst = make_instance(s);
    const fs::path dir = resolve_dir(args.out);
    io::write_observations_file(dir / "obs.txt", inst.obs);
    io::write_matrix_file(dir / "truth.txt", inst.truth);
    json j{{"command", "simulate"},
           {"scenario", to_json(s)},
           {"noise_sigma", inst.sigma},
           {"observations", inst.obs.size()},
           {"files", {{"observations", "obs.txt"}, {"truth", "truth.txt"}}}};
    io::write_json_file(dir / "simulate.json", j);
    std::cout << "wrote " << inst.obs.size() << " observations to " << dir.string() << '\n';
    return 0;
}

// ---- solve

struct SolveArgs {
    std::string obs;
    std::string truth;
    std::string method = "tl1";
    double lambda = 1e-3;
    double a = 100.0;
    std::optional<double> zeta;
    std::optional<double> rho;
    double tau = kDefaultTau;
    double tol = 1e-5;
    int max_iters = 500;
    std::string format = "text";
    std::string out;
};

int run_solve(const SolveArgs& args)
{
    const ObservationSet obs = io::read_observations_file(args.obs);
    std::optional<DenseMatrix> truth;
    if (!args.truth.empty()) {
        truth = io::read_matrix_file(args.truth);
    }
    SolverConfig cfg;
    cfg.regularizer = parse_regularizer(args.method);
    cfg.lambda = args.lambda;
    cfg.a = args.a;
    cfg.tau = args.tau;
    cfg.tol = args.tol;
    cfg.max_iters = args.max_iters;
    cfg.rho = args.rho.value_or(SolverConfig::rho_for(obs.size()));
    if (args.zeta) {
        cfg.zeta = *args.zeta;
    } else {
        // no bound given: 1.2 times the largest magnitude available
        double m = 0.0;
        for (const auto& e : obs.samples()) {
            m = std::max(m, std::abs(e.value));
        }
        if (truth) {
            m = std::max(m, max_abs(*truth));
        }
        cfg.zeta = m > 0.0 ? 1.2 * m : 1.0;
    }
    const SolveReport rep = solve(obs, cfg);
    const fs::path dir = resolve_dir(args.out);
    const io::MatrixFormat fmt = format_of(args.format);
    const std::string name = fmt == io::MatrixFormat::Csv ? "estimate.csv" : "estimate.txt";
    io::write_matrix_file(dir / name, rep.estimate, fmt);
    json j{{"command", "solve"},
           {"observations", args.obs},
           {"n", obs.size()},
           {"rows", obs.rows()},
           {"cols", obs.cols()},
           {"config", to_json(cfg)},
           {"report", report_json(rep)},
           {"estimate_file", name}};
    if (truth) {
        const double re = relative_error(rep.estimate, *truth);
        j["relative_error"] = re;
        std::cout << "relative_error " << format_double(re) << '\n';
    }
    io::write_json_file(dir / "report.json", j);
    std::cout << "iterations " << rep.iterations << " converged " << (rep.converged ? "yes" : "no") << " rank "
              << rep.estimated_rank << '\n';
    return 0;
}

// ---- tune

struct TuneArgs {
    std::string obs;
    std::string truth;
    std::string validation;
    std::string grid;
    std::string method = "tl1";
    std::optional<double> zeta;
    std::vector<double> range;
    std::string out;
};

int run_tune(const TuneArgs& args)
{
    if (args.truth.empty() == args.validation.empty()) {
        throw InvalidArgument("tune: give exactly one of --truth or --validation");
    }
    const ObservationSet obs = io::read_observations_file(args.obs);
    TuningGrid grid = args.grid.empty() ? TuningGrid::defaults() : io::grid_from_json(io::read_json_file(args.grid));
    grid.fixed.rho = SolverConfig::rho_for(obs.size());
    TuningContext ctx;
    if (!args.truth.empty()) {
        DenseMatrix t = io::read_matrix_file(args.truth);
        grid.fixed.zeta = args.zeta.value_or(1.2 * max_abs(t));
        ctx = TuningContext::against_truth(std::move(t));
    } else {
        std::optional<std::pair<double, double>> range;
        if (args.range.size() == 2) {
            range = std::make_pair(args.range[0], args.range[1]);
        } else if (!args.range.empty()) {
            throw InvalidArgument("tune: --range takes two values");
        }
        if (!args.zeta) {
            throw InvalidArgument("tune: --zeta is required with --validation");
        }
        grid.fixed.zeta = *args.zeta;
        ctx = TuningContext::against_validation(io::read_entries_file(args.validation), range);
    }
    const Regularizer method = parse_regularizer(args.method);
    const GridSearchResult r = grid_search(obs, grid, ctx, method);

    const fs::path dir = resolve_dir(args.out);
    std::ofstream csv(dir / "surface.csv");
    csv << "a,lambda_multiplier,lambda,score,estimated_rank,iterations,converged\n";
    for (const auto& c : r.surface) {
        csv << format_double(c.a) << ',' << format_double(c.lambda_multiplier) << ',' << format_double(c.lambda)
            << ',' << format_double(c.score) << ',' << c.estimated_rank << ',' << c.iterations << ','
            << (c.converged ? 1 : 0) << '\n';
    }
    json j{{"command", "tune"},
           {"observations", args.obs},
           {"objective", args.truth.empty() ? "trmse_on_validation" : "re_vs_truth"},
           {"grid", to_json(grid)},
           {"best_config", to_json(r.best_config)},
           {"best", to_json(r.best)},
           {"best_score", r.best_score}};
    io::write_json_file(dir / "best.json", j);
    std::cout << "best score " << format_double(r.best_score) << " at lambda " << format_double(r.best.lambda)
              << " a " << format_double(r.best.a) << '\n';
    return 0;
}

// ---- bench

struct BenchArgs {
    std::string campaign;
    std::optional<int> trials;
    std::string out_dir;
};

int run_bench(const BenchArgs& args)
{
    const json cfg = io::read_json_file(args.campaign);
    std::vector<ScenarioSpec> scenarios;
    std::vector<Regularizer> methods;
    TuningGrid grid = TuningGrid::defaults();
    int trials = 10;
    try {
        for (const auto& s : cfg.at("scenarios")) {
            scenarios.push_back(io::scenario_from_json(s));
        }
        for (const auto& m : cfg.value("methods", json::array({"tl1", "nuclear"}))) {
            methods.push_back(parse_regularizer(m.get<std::string>()));
        }
        if (cfg.contains("grid")) {
            grid = io::grid_from_json(cfg.at("grid"));
        }
        trials = cfg.value("trials", trials);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("campaign config: ") + e.what());
    }
    if (args.trials) {
        trials = *args.trials;
    }
    if (scenarios.empty() || methods.empty()) {
        throw InvalidArgument("campaign config: needs at least one scenario and one method");
    }
    const CampaignResult result = run_campaign(scenarios, methods, trials, grid);
    const fs::path dir = resolve_dir(args.out_dir);
    {
        std::ofstream csv(dir / "campaign.csv");
        write_campaign_csv(csv, result);
    }
    json j = campaign_json(result, grid);
    j["command"] = "bench";
    j["campaign_file"] = args.campaign;
    io::write_json_file(dir / "campaign.json", j);
    for (const auto& a : result.aggregates) {
        std::cout << "scenario " << a.scenario << ' ' << to_string(a.method) << " mean RE "
                  << format_double(a.mean_re) << " (" << format_double(a.std_re) << ") rank "
                  << format_double(a.mean_rank) << '\n';
    }
    return 0;
}

// ---- asweep

struct ASweepArgs {
    std::string scenario;
    std::vector<double> a_values;
    std::string out;
};

int run_asweep(const ASweepArgs& args)
{
    const json cfg = io::read_json_file(args.scenario);
    const json& sj = cfg.contains("scenario") ? cfg.at("scenario") : cfg;
    const ScenarioSpec s = io::scenario_from_json(sj);
    TuningGrid grid = cfg.contains("grid") ? io::grid_from_json(cfg.at("grid")) : TuningGrid::defaults();
    std::vector<double> a_values = args.a_values;
    if (a_values.empty()) {
        a_values = cfg.contains("a_values") ? cfg.at("a_values").get<std::vector<double>>() : grid.a_values;
    }
    const auto rows = a_sweep(s, a_values, grid);
    fs::path out = args.out.empty() ? resolve_dir("") / "asweep.csv" : fs::path(args.out);
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    {
        std::ofstream csv(out);
        if (!csv) {
            throw InvalidArgument("cannot write '" + out.string() + "'");
        }
        write_a_sweep_csv(csv, rows);
    }
    json j{{"command", "asweep"}, {"scenario", to_json(s)}, {"grid", to_json(grid)}, {"a_values", a_values}};
    fs::path meta = out;
    meta.replace_extension(".json");
    io::write_json_file(meta, j);
    write_a_sweep_csv(std::cout, rows);
    return 0;
}

// ---- realdata

struct RealDataArgs {
    std::string dataset;
    std::string train;
    std::string test;
    std::uint64_t seed = 0;
    std::string grid;
    std::vector<std::string> methods{"tl1", "nuclear"};
    std::string out_dir;
};

int run_realdata_cmd(const RealDataArgs& args)
{
    io::RatingDataset data;
    if (args.dataset == "movielens") {
        data = io::parse_movielens_files(args.train, args.test);
    } else if (args.dataset == "coat") {
        data = io::parse_coat_files(args.train, args.test);
    } else {
        throw InvalidArgument("realdata: unknown dataset '" + args.dataset + "'");
    }
    for (const auto& w : data.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    TuningGrid grid = args.grid.empty() ? TuningGrid::defaults() : io::grid_from_json(io::read_json_file(args.grid));
    RealDataOptions opt;
    opt.seed = args.seed;
    opt.methods.clear();
    for (const auto& m : args.methods) {
        opt.methods.push_back(parse_regularizer(m));
    }
    const RealDataResult r = run_realdata(data, grid, opt);
    json j = realdata_json(r, grid, opt);
    j["command"] = "realdata";
    j["dataset"] = args.dataset;
    j["train_file"] = args.train;
    j["test_file"] = args.test;
    j["n_users"] = data.n_users;
    j["n_items"] = data.n_items;
    j["accepted_lines"] = data.accepted_lines;
    j["warnings"] = data.warnings;
    const fs::path dir = resolve_dir(args.out_dir);
    io::write_json_file(dir / ("realdata_" + args.dataset + ".json"), j);
    for (const auto& m : r.methods) {
        std::cout << to_string(m.method) << " TRMSE " << format_double(m.evaluation_trmse) << " rank "
                  << m.estimated_rank << '\n';
    }
    return 0;
}

// ---- prox-check

int run_prox_check(std::size_t samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-10.0, 10.0);
    std::uniform_real_distribution<double> ulog_mu(std::log(1e-3), std::log(10.0));
    std::uniform_real_distribution<double> ulog_a(std::log(0.1), std::log(3000.0));
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = ux(rng);
        const ProxParams p{std::exp(ulog_mu(rng)), std::exp(ulog_a(rng))};
        const double z = tl1_scalar_prox(x, p);
        const double fz = tl1_prox_objective(z, x, p);
        // brute force on a 1e-4 grid covering [-|x|-1, |x|+1]
        const double half = std::abs(x) + 1.0;
        const auto steps = static_cast<long>(std::ceil(2.0 * half / 1e-4));
        double best = tl1_prox_objective(0.0, x, p);
        for (long k = 0; k <= steps; ++k) {
            best = std::min(best, tl1_prox_objective(-half + 1e-4 * static_cast<double>(k), x, p));
        }
        const double gap = fz - best;
        worst = std::max(worst, gap);
        if (gap > 1e-9) {
            ++violations;
            std::cerr << "violation: x=" << format_double(x) << " mu=" << format_double(p.mu)
                      << " a=" << format_double(p.a) << " gap=" << format_double(gap) << '\n';
        }
    }
    std::cout << "prox-check samples " << samples << " seed " << seed << " violations " << violations
              << " worst_gap " << format_double(worst) << '\n';
    return violations == 0 ? 0 : kExitViolation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"TL1-regularized matrix completion"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic instance");
    c_sim->add_option("--scheme", sim.scheme, "Sampling scheme 1, 2 or 3")->check(CLI::Range(1, 3));
    c_sim->add_option("--m1", sim.m1)->check(CLI::PositiveNumber);
    c_sim->add_option("--m2", sim.m2)->check(CLI::PositiveNumber);
    c_sim->add_option("--rank", sim.rank)->check(CLI::PositiveNumber);
    c_sim->add_option("--sr", sim.sr, "Sampling ratio");
    c_sim->add_option("--snr", sim.snr, "SNR in dB; omit for noiseless");
    c_sim->add_option("--seed", sim.seed);
    c_sim->add_option("--out", sim.out, "Output directory");

    SolveArgs sol;
    auto* c_solve = app.add_subcommand("solve", "Run the ADMM solver on an observation file");
    c_solve->add_option("--obs", sol.obs)->required()->check(CLI::ExistingFile);
    c_solve->add_option("--truth", sol.truth, "Ground truth for reporting RE")->check(CLI::ExistingFile);
    c_solve->add_option("--method", sol.method)->check(CLI::IsMember({"tl1", "nuclear"}));
    c_solve->add_option("--lambda", sol.lambda);
    c_solve->add_option("--a", sol.a);
    c_solve->add_option("--zeta", sol.zeta);
    c_solve->add_option("--rho", sol.rho, "Default 0.5/n");
    c_solve->add_option("--tau", sol.tau);
    c_solve->add_option("--tol", sol.tol);
    c_solve->add_option("--max-iters", sol.max_iters);
    c_solve->add_option("--format", sol.format)->check(CLI::IsMember({"text", "csv"}));
    c_solve->add_option("--out", sol.out, "Output directory");

    TuneArgs tun;
    auto* c_tune = app.add_subcommand("tune", "Grid search over lambda and a");
    c_tune->add_option("--obs", tun.obs)->required()->check(CLI::ExistingFile);
    auto* o_truth = c_tune->add_option("--truth", tun.truth)->check(CLI::ExistingFile);
    auto* o_val = c_tune->add_option("--validation", tun.validation)->check(CLI::ExistingFile);
    o_truth->excludes(o_val);
    c_tune->add_option("--grid", tun.grid)->check(CLI::ExistingFile);
    c_tune->add_option("--method", tun.method)->check(CLI::IsMember({"tl1", "nuclear"}));
    c_tune->add_option("--zeta", tun.zeta);
    c_tune->add_option("--range", tun.range, "Prediction clamp range lo hi")->expected(2);
    c_tune->add_option("--out", tun.out, "Output directory");

    BenchArgs ben;
    auto* c_bench = app.add_subcommand("bench", "Run a simulation campaign");
    c_bench->add_option("--campaign", ben.campaign)->required()->check(CLI::ExistingFile);
    c_bench->add_option("--trials", ben.trials)->check(CLI::PositiveNumber);
    c_bench->add_option("--out-dir", ben.out_dir);

    ASweepArgs asw;
    auto* c_asweep = app.add_subcommand("asweep", "Best RE and rank as a function of a");
    c_asweep->add_option("--scenario", asw.scenario)->required()->check(CLI::ExistingFile);
    c_asweep->add_option("--a", asw.a_values, "a values (overrides the config)");
    c_asweep->add_option("--out", asw.out, "Output CSV path");

    RealDataArgs rd;
    auto* c_real = app.add_subcommand("realdata", "Rating prediction on MovieLens or Coat");
    c_real->add_option("--dataset", rd.dataset)->required()->check(CLI::IsMember({"movielens", "coat"}));
    c_real->add_option("--train", rd.train)->required()->check(CLI::ExistingFile);
    c_real->add_option("--test", rd.test)->required()->check(CLI::ExistingFile);
    c_real->add_option("--seed", rd.seed);
    c_real->add_option("--grid", rd.grid)->check(CLI::ExistingFile);
    c_real->add_option("--methods", rd.methods)->check(CLI::IsMember({"tl1", "nuclear"}));
    c_real->add_option("--out-dir", rd.out_dir);

    std::size_t pc_samples = 1000;
    std::uint64_t pc_seed = 0;
    auto* c_prox = app.add_subcommand("prox-check", "Check the scalar prox against brute force");
    c_prox->add_option("--samples", pc_samples)->check(CLI::PositiveNumber);
    c_prox->add_option("--seed", pc_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_sim) {
            return run_simulate(sim);
        }
        if (*c_solve) {
            return run_solve(sol);
        }
        if (*c_tune) {
            return run_tune(tun);
        }
        if (*c_bench) {
            return run_bench(ben);
        }
        if (*c_asweep) {
            return run_asweep(asw);
        }
        if (*c_real) {
            return run_realdata_cmd(rd);
        }
        if (*c_prox) {
            return run_prox_check(pc_samples, pc_seed);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
