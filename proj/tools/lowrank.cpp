// Command-line front end: one subcommand per experiment family, shared
// flags, optional config file. Exit codes: 0 success, 1 numerical failure,
// 2 parameter error, 3 IO error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <lowrank/lowrank.hpp>

namespace {

using namespace lowrank;

struct Flags {
    long long n = 0;
    long long rank = 0;
    double p = 0.0;
    long long trials = 0;
    unsigned long long seed = 0;
    double tol = 0.0;
    double grid_step = 0.0;
    std::string out;
    long long workers = 0;
    std::string config;
    std::vector<long long> ranks;
    long long quota = 0;
    bool full_scan = false;
    std::string format = "all";
    long long max_iters = 0;
    long long clique_small = 0;
    long long clique_large = 0;
    long long noise_dims = 0;

    CLI::Option* o_n = nullptr;
    CLI::Option* o_rank = nullptr;
    CLI::Option* o_p = nullptr;
    CLI::Option* o_trials = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_tol = nullptr;
    CLI::Option* o_grid_step = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_workers = nullptr;
    CLI::Option* o_config = nullptr;
    CLI::Option* o_ranks = nullptr;
    CLI::Option* o_quota = nullptr;
    CLI::Option* o_full_scan = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_max_iters = nullptr;
    CLI::Option* o_clique_small = nullptr;
    CLI::Option* o_clique_large = nullptr;
    CLI::Option* o_noise_dims = nullptr;
};

void add_common(CLI::App* sub, Flags& f) {
    f.o_n = sub->add_option("--n", f.n, "problem dimension");
    f.o_rank = sub->add_option(
        "--rank", f.rank, "instance rank (cluster count for structured, clique size "
                          "for decompose; narrows phase to a single rank)");
    f.o_p = sub->add_option("--p", f.p, "observation probability in (0, 1]");
    f.o_trials = sub->add_option("--trials", f.trials, "trials per grid point");
    f.o_seed = sub->add_option("--seed", f.seed, "base seed for all derived randomness");
    f.o_tol = sub->add_option("--tol", f.tol, "solver relative tolerance");
    f.o_grid_step = sub->add_option("--grid-step", f.grid_step, "phase-grid spacing");
    f.o_out = sub->add_option("--out", f.out, "output directory");
    f.o_workers = sub->add_option("--workers", f.workers, "concurrent trial workers");
    f.o_config = sub->add_option(
        "--config", f.config, "config file, key=value lines or a JSON object; "
                              "explicit flags override file values");
    f.o_ranks = sub->add_option("--ranks", f.ranks, "comma-separated rank sweep (phase)")
                    ->delimiter(',');
    f.o_quota = sub->add_option("--quota", f.quota, "successes required per grid cell");
    f.o_full_scan =
        sub->add_flag("--full-scan", f.full_scan, "scan the whole phase grid (audit mode)");
    f.o_format = sub->add_option("--format", f.format, "report format: csv, json, svg, all")
                     ->check(CLI::IsMember({"csv", "json", "svg", "all"}));
    f.o_max_iters = sub->add_option("--max-iters", f.max_iters, "solver iteration cap");
    f.o_clique_small =
        sub->add_option("--clique-small", f.clique_small, "small clique size (clique sweep)");
    f.o_clique_large =
        sub->add_option("--clique-large", f.clique_large, "large clique size (clique sweep)");
    f.o_noise_dims = sub->add_option("--noise-dims", f.noise_dims,
                                     "extra side-basis directions (structured)");
}

long long to_ll(const std::string& key, const std::string& val) {
    char* end = nullptr;
    const long long x = std::strtoll(val.c_str(), &end, 10);
    if (end == val.c_str() || *end != '\0')
        throw parameter_error("config key '" + key + "': expected an integer, got '" +
                              val + "'");
    return x;
}

unsigned long long to_ull(const std::string& key, const std::string& val) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(val.c_str(), &end, 10);
    if (end == val.c_str() || *end != '\0')
        throw parameter_error("config key '" + key + "': expected an integer, got '" +
                              val + "'");
    return x;
}

double to_double(const std::string& key, const std::string& val) {
    char* end = nullptr;
    const double x = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0')
        throw parameter_error("config key '" + key + "': expected a number, got '" + val +
                              "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& val) {
    if (val == "true" || val == "1" || val == "yes" || val == "on") return true;
    if (val == "false" || val == "0" || val == "no" || val == "off") return false;
    throw parameter_error("config key '" + key + "': expected a boolean, got '" + val +
                          "'");
}

// File values fill the config; later, explicit flags overwrite.
void apply_config_file(ExperimentConfig& cfg, std::string& format, bool& ranks_from_file,
                       bool& quota_from_file,
                       const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) {
        if (key == "n") cfg.n = to_ll(key, val);
        else if (key == "rank") cfg.rank = to_ll(key, val);
        else if (key == "p") cfg.p = to_double(key, val);
        else if (key == "trials") cfg.trials = static_cast<int>(to_ll(key, val));
        else if (key == "seed") cfg.base_seed = to_ull(key, val);
        else if (key == "tol") cfg.solver.rel_tol = to_double(key, val);
        else if (key == "grid-step" || key == "grid_step")
            cfg.grid_step = to_double(key, val);
        else if (key == "out") cfg.out_dir = val;
        else if (key == "workers") cfg.workers = static_cast<int>(to_ll(key, val));
        else if (key == "quota") {
            cfg.success_quota = static_cast<int>(to_ll(key, val));
            quota_from_file = true;
        }
        else if (key == "full-scan" || key == "full_scan") cfg.full_scan = to_bool(key, val);
        else if (key == "format") format = val;
        else if (key == "max-iters" || key == "max_iters")
            cfg.solver.max_iters = static_cast<int>(to_ll(key, val));
        else if (key == "clique-small" || key == "clique_small")
            cfg.clique_small = to_ll(key, val);
        else if (key == "clique-large" || key == "clique_large")
            cfg.clique_large = to_ll(key, val);
        else if (key == "noise-dims" || key == "noise_dims")
            cfg.noise_dims = to_ll(key, val);
        else if (key == "ranks") {
            cfg.ranks.clear();
            std::size_t start = 0;
            for (std::size_t i = 0; i <= val.size(); ++i)
                if (i == val.size() || val[i] == ',') {
                    cfg.ranks.push_back(to_ll(key, val.substr(start, i - start)));
                    start = i + 1;
                }
            ranks_from_file = true;
        } else {
            throw parameter_error("config file: unknown key '" + key + "'");
        }
    }
}

int run(const ExperimentConfig& cfg, const std::string& format) {
    const ExperimentOutput result = run_experiment(cfg);
    const std::filesystem::path out_dir = cfg.out_dir;
    const PhaseCurve* curve = result.curve ? &*result.curve : nullptr;

    if (format == "csv" || format == "all")
        emit_report(out_dir, result.records, curve, ReportFormat::csv);
    if (format == "json" || format == "all")
        emit_report(out_dir, result.records, curve, ReportFormat::json);
    if (format == "svg" || (format == "all" && curve))
        emit_report(out_dir, result.records, curve, ReportFormat::svg);

    if (!result.certificates.empty()) {
        write_certificate_csv(out_dir / "certificate.csv", result.certificates);
        for (std::size_t i = 0; i < result.certificates.size(); ++i) {
            char name[48];
            std::snprintf(name, sizeof name, "certificate_trial_%03zu.json", i);
            write_certificate_trial_json(out_dir / name, result.certificates[i]);
        }
    }
    if (result.sample_estimate) {
        write_matrix(out_dir / "estimate.txt", *result.sample_estimate);
        write_solver_sidecar(out_dir / "solver.txt", result.sample_iterations,
                             result.sample_residual, result.sample_converged,
                             result.sample_lambda);
    }

    if (curve) {
        for (std::size_t i = 0; i < curve->ranks.size(); ++i) {
            std::cout << "r=" << curve->ranks[i] << "  p*=";
            if (curve->p_star[i])
                std::cout << format_g17(*curve->p_star[i]);
            else
                std::cout << "above 1";
            std::cout << "  reference=" << format_g17(curve->reference[i]) << '\n';
        }
    }
    int successes = 0;
    for (const auto& rec : result.records) successes += rec.success ? 1 : 0;
    std::cout << cfg.experiment << ": " << result.records.size() << " trials, "
              << successes << " successes; reports in " << out_dir.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank matrix recovery toolkit: nuclear-norm completion, trimmed "
                 "SVD projection, structured completion, sparse decomposition, dual "
                 "certificates, and phase-transition sweeps"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* blurb;
    };
    const Sub subs[] = {
        {"complete", "nuclear-norm completion of random low-rank instances"},
        {"svd-project", "trimmed rank-r SVD projection error study"},
        {"structured", "completion with known side subspaces (clustering instances)"},
        {"decompose", "low-rank + sparse decomposition of a planted-clique instance"},
        {"certify", "golfing-scheme dual-certificate validation campaign"},
        {"phase", "minimal-p phase transition sweep over ranks"},
        {"clique", "planted-clique recovery sweep over two clique sizes"},
    };
    std::vector<Flags> flags(std::size(subs));
    std::vector<CLI::App*> apps;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* sub = app.add_subcommand(subs[i].name, subs[i].blurb);
        add_common(sub, flags[i]);
        apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);

        std::size_t which = 0;
        for (std::size_t i = 0; i < apps.size(); ++i)
            if (apps[i]->parsed()) which = i;
        const Flags& f = flags[which];

        ExperimentConfig cfg;
        cfg.experiment = subs[which].name;
        std::string format = "all";
        bool ranks_set = false;
        bool quota_set = false;

        if (f.o_config->count())
            apply_config_file(cfg, format, ranks_set, quota_set,
                              parse_config_file(f.config));

        if (f.o_n->count()) cfg.n = f.n;
        if (f.o_rank->count()) cfg.rank = f.rank;
        if (f.o_p->count()) cfg.p = f.p;
        if (f.o_trials->count()) cfg.trials = static_cast<int>(f.trials);
        if (f.o_seed->count()) cfg.base_seed = f.seed;
        if (f.o_tol->count()) cfg.solver.rel_tol = f.tol;
        if (f.o_grid_step->count()) cfg.grid_step = f.grid_step;
        if (f.o_out->count()) cfg.out_dir = f.out;
        if (f.o_workers->count()) cfg.workers = static_cast<int>(f.workers);
        if (f.o_quota->count()) {
            cfg.success_quota = static_cast<int>(f.quota);
            quota_set = true;
        }
        if (f.o_full_scan->count()) cfg.full_scan = f.full_scan;
        if (f.o_format->count()) format = f.format;
        if (f.o_max_iters->count()) cfg.solver.max_iters = static_cast<int>(f.max_iters);
        if (f.o_clique_small->count()) cfg.clique_small = f.clique_small;
        if (f.o_clique_large->count()) cfg.clique_large = f.clique_large;
        if (f.o_noise_dims->count()) cfg.noise_dims = f.noise_dims;
        if (f.o_ranks->count()) {
            cfg.ranks.assign(f.ranks.begin(), f.ranks.end());
            ranks_set = true;
        }
        if (cfg.experiment == "phase" && !ranks_set && f.o_rank->count())
            cfg.ranks = {cfg.rank};
        // The default quota tracks the default trial count; a reduced
        // --trials stays usable without forcing an explicit --quota.
        if (!quota_set && cfg.success_quota > cfg.trials)
            cfg.success_quota = cfg.trials;
        if (format != "csv" && format != "json" && format != "svg" && format != "all")
            throw parameter_error("format must be one of csv, json, svg, all");

        return run(cfg, format);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
