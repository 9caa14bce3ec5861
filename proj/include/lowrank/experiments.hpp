#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lowrank/certificate.hpp"
#include "lowrank/completion.hpp"
#include "lowrank/decomposition.hpp"
#include "lowrank/generators.hpp"
#include "lowrank/structured.hpp"
#include "lowrank/svd_projection.hpp"

namespace lowrank {

// Normalized recovery error below this counts as success.
inline constexpr double kSuccessThreshold = 1e-4;

struct TrialRecord {
    std::string experiment;
    index_t n = 0;
    index_t r = 0;
    double p = 0.0;
    RngSeed seed = 0;
    double rel_error = 0.0;
    bool success = false;  // rel_error <= kSuccessThreshold and converged
    double wall_time = 0.0;
    // Experiment-specific scalars (iteration counts, bound values, ...).
    // Informational; not part of the CSV schema.
    std::map<std::string, double> extra;
};

struct PhaseCurve {
    std::vector<index_t> ranks;
    // Smallest grid p reaching the success quota; empty optional when no
    // grid point does (the "above 1" sentinel).
    std::vector<std::optional<double>> p_star;
    int trials_per_point = 20;
    int success_quota = 19;
    double grid_step = 0.02;
    // (1/2) mu0 r ln(2n) / n per rank, the information-theoretic reference.
    std::vector<double> reference;
};

struct ExperimentConfig {
    std::string experiment = "complete";
    index_t n = 240;
    // Per experiment this is the instance rank, the cluster count
    // (structured), or the planted clique size (decompose).
    index_t rank = 2;
    std::vector<index_t> ranks = {2, 4, 8, 16};  // phase sweep
    double p = 0.3;
    int trials = 20;
    RngSeed base_seed = 20240601;
    SolverOptions solver;
    double grid_step = 0.02;
    int success_quota = 19;
    int workers = 1;
    std::string out_dir = "out";
    bool full_scan = false;   // phase: audit every grid cell instead of bisecting
    index_t clique_small = 10;
    index_t clique_large = 80;
    index_t noise_dims = 0;   // structured: extra side-basis directions
};

inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.solver);
    if (cfg.n <= 0) throw parameter_error("ExperimentConfig: n must be positive");
    if (cfg.rank <= 0) throw parameter_error("ExperimentConfig: rank must be positive");
    if (cfg.trials < 1) throw parameter_error("ExperimentConfig: trials must be at least 1");
    if (!(cfg.p > 0.0 && cfg.p <= 1.0))
        throw parameter_error("ExperimentConfig: p must lie in (0, 1]");
    if (!(cfg.grid_step > 0.0 && cfg.grid_step <= 1.0))
        throw parameter_error("ExperimentConfig: grid-step must lie in (0, 1]");
    if (cfg.success_quota < 1 || cfg.success_quota > cfg.trials)
        throw parameter_error("ExperimentConfig: success quota must lie in [1, trials]");
    if (cfg.workers < 1) throw parameter_error("ExperimentConfig: workers must be at least 1");
    if (cfg.ranks.empty()) throw parameter_error("ExperimentConfig: rank grid is empty");
    for (std::size_t i = 0; i < cfg.ranks.size(); ++i) {
        if (cfg.ranks[i] <= 0)
            throw parameter_error("ExperimentConfig: ranks must be positive");
        if (i > 0 && cfg.ranks[i] <= cfg.ranks[i - 1])
            throw parameter_error("ExperimentConfig: ranks must be strictly increasing");
    }
    if (cfg.clique_small <= 0 || cfg.clique_large <= 0)
        throw parameter_error("ExperimentConfig: clique sizes must be positive");
    if (cfg.noise_dims < 0)
        throw parameter_error("ExperimentConfig: noise-dims must be nonnegative");
}

// Runs fn(0..count-1) across up to `workers` threads. Results must be
// written into pre-sized slots keyed by index so the outcome is identical
// under any schedule. The first exception wins and is rethrown after join.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const int use = static_cast<int>(
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1))));
    if (use <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> bail{false};
    std::exception_ptr first;
    std::mutex first_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(use));
    for (int t = 0; t < use; ++t)
        pool.emplace_back([&] {
            while (!bail.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(first_mu);
                    if (!first) first = std::current_exception();
                    bail.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

namespace detail {

struct StopWatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

} // namespace detail

// Minimal-p search per rank over the grid {step, 2*step, ..., 1.0}. A cell
// (r, p) passes when at least success_quota of trials_per_point trials
// recover the block-diagonal instance to kSuccessThreshold. The search
// bisects assuming success is monotone in p; full_scan walks the whole grid
// instead for auditing. Trial seeds are derive_seed(base_seed, r, grid
// index, trial index), so any cell is reproducible in isolation.
inline PhaseCurve phase_transition(const ExperimentConfig& cfg,
                                   std::vector<TrialRecord>* out_records = nullptr) {
    validate(cfg);
    for (index_t r : cfg.ranks)
        if (cfg.n % r != 0)
            throw parameter_error("phase_transition: every rank must divide n");

    std::vector<double> grid;
    for (int k = 1; static_cast<double>(k) * cfg.grid_step < 1.0 - 1e-12; ++k)
        grid.push_back(static_cast<double>(k) * cfg.grid_step);
    grid.push_back(1.0);

    PhaseCurve curve;
    curve.ranks = cfg.ranks;
    curve.trials_per_point = cfg.trials;
    curve.success_quota = cfg.success_quota;
    curve.grid_step = cfg.grid_step;

    for (index_t r : cfg.ranks) {
        const Matrix M = gen_block_diagonal(cfg.n, r);
        const double normM = M.norm();
        SvdFactors f = svd(M, r);
        const double mu0 =
            incoherence_report(SubspacePair(f.U, f.V)).mu0;
        curve.reference.push_back(0.5 * mu0 * static_cast<double>(r) *
                                  std::log(2.0 * static_cast<double>(cfg.n)) /
                                  static_cast<double>(cfg.n));

        // grid index -> (pass, trial records); evaluated lazily, memoized
        std::map<int, std::pair<bool, std::vector<TrialRecord>>> cells;
        auto run_trial = [&](int gi, int t) {
            const RngSeed seed = derive_seed(cfg.base_seed, static_cast<RngSeed>(r),
                                             static_cast<RngSeed>(gi),
                                             static_cast<RngSeed>(t));
            detail::StopWatch sw;
            const ObservationMask mask =
                sample_bernoulli(cfg.n, cfg.n, grid[static_cast<std::size_t>(gi)],
                                 /*symmetric=*/true, seed);
            const SolverResult res = complete_nuclear(M, mask, cfg.solver);
            TrialRecord rec;
            rec.experiment = "phase";
            rec.n = cfg.n;
            rec.r = r;
            rec.p = grid[static_cast<std::size_t>(gi)];
            rec.seed = seed;
            rec.rel_error = (res.estimate - M).norm() / normM;
            rec.success = rec.rel_error <= kSuccessThreshold && res.converged;
            rec.wall_time = sw.seconds();
            rec.extra["iterations"] = static_cast<double>(res.iterations);
            return rec;
        };
        auto eval_cell = [&](int gi) -> bool {
            auto it = cells.find(gi);
            if (it != cells.end()) return it->second.first;
            std::vector<TrialRecord> recs;
            int ok = 0;
            if (cfg.workers <= 1) {
                // Serial cells stop as soon as the quota decision is fixed.
                for (int t = 0; t < cfg.trials; ++t) {
                    recs.push_back(run_trial(gi, t));
                    if (recs.back().success) ++ok;
                    if (ok >= cfg.success_quota) break;
                    const int failures = static_cast<int>(recs.size()) - ok;
                    if (failures > cfg.trials - cfg.success_quota) break;
                }
            } else {
                recs.resize(static_cast<std::size_t>(cfg.trials));
                parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers,
                             [&](std::size_t t) {
                                 recs[t] = run_trial(gi, static_cast<int>(t));
                             });
                for (const auto& rec : recs) ok += rec.success ? 1 : 0;
            }
            const bool pass = ok >= cfg.success_quota;
            cells.emplace(gi, std::make_pair(pass, std::move(recs)));
            return pass;
        };

        std::optional<double> p_star;
        if (cfg.full_scan) {
            for (int gi = 0; gi < static_cast<int>(grid.size()); ++gi)
                if (eval_cell(gi) && !p_star)
                    p_star = grid[static_cast<std::size_t>(gi)];
        } else if (eval_cell(static_cast<int>(grid.size()) - 1)) {
            int lo = 0, hi = static_cast<int>(grid.size()) - 1;
            while (lo < hi) {
                const int mid = lo + (hi - lo) / 2;
                if (eval_cell(mid))
                    hi = mid;
                else
                    lo = mid + 1;
            }
            p_star = grid[static_cast<std::size_t>(lo)];
        }
        curve.p_star.push_back(p_star);

        if (out_records)
            for (auto& [gi, cell] : cells)
                for (auto& rec : cell.second) out_records->push_back(std::move(rec));
    }
    return curve;
}

struct ExperimentOutput {
    std::vector<TrialRecord> records;
    std::optional<PhaseCurve> curve;               // phase only
    std::vector<CertificateReport> certificates;   // certify only
    // First trial's solver output, for the serialized estimate + sidecar.
    std::optional<Matrix> sample_estimate;
    int sample_iterations = 0;
    double sample_residual = 0.0;
    bool sample_converged = false;
    double sample_lambda = 0.0;  // 0 when the solver has no sparsity weight
};

// Dispatches one experiment family. Every trial's seed chain is
// derive_seed(base_seed, grid index, trial index), with instance and mask
// draws split off that, so records are reproducible per (config, base_seed).
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentOutput out;

    auto trial_seed = [&](RngSeed grid_index, int t) {
        return derive_seed(cfg.base_seed, grid_index, static_cast<RngSeed>(t));
    };

    if (cfg.experiment == "phase") {
        out.curve = phase_transition(cfg, &out.records);
        return out;
    }

    if (cfg.experiment == "complete") {
        out.records.resize(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t t) {
            const RngSeed ts = trial_seed(0, static_cast<int>(t));
            detail::StopWatch sw;
            const LowRankInstance inst =
                gen_random_low_rank(cfg.n, cfg.n, cfg.rank, derive_seed(ts, 1));
            const ObservationMask mask =
                sample_bernoulli(cfg.n, cfg.n, cfg.p, false, derive_seed(ts, 2));
            const SolverResult res = complete_nuclear(inst.M, mask, cfg.solver);
            TrialRecord& rec = out.records[t];
            rec.experiment = cfg.experiment;
            rec.n = cfg.n;
            rec.r = cfg.rank;
            rec.p = cfg.p;
            rec.seed = ts;
            rec.rel_error = (res.estimate - inst.M).norm() / inst.M.norm();
            rec.success = rec.rel_error <= kSuccessThreshold && res.converged;
            rec.wall_time = sw.seconds();
            rec.extra["iterations"] = static_cast<double>(res.iterations);
            rec.extra["final_residual"] = res.final_residual;
            if (t == 0) {
                out.sample_estimate = res.estimate;
                out.sample_iterations = res.iterations;
                out.sample_residual = res.final_residual;
                out.sample_converged = res.converged;
            }
        });
        return out;
    }

    if (cfg.experiment == "svd-project") {
        if (cfg.n % cfg.rank != 0)
            throw parameter_error("run_experiment: svd-project needs rank | n");
        const Matrix M = gen_block_diagonal(cfg.n, cfg.rank);
        const double normM = M.norm();
        const Vector sigma_true = svd(M).singular_values;
        const SvdBounds bounds = evaluate_svd_bounds(M, cfg.p, cfg.rank, 10.0, 10.0);
        out.records.resize(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t t) {
            const RngSeed ts = trial_seed(0, static_cast<int>(t));
            detail::StopWatch sw;
            const ObservationMask mask =
                sample_bernoulli(cfg.n, cfg.n, cfg.p, false, derive_seed(ts, 2));
            const Matrix est = svd_project(M, mask, cfg.p, cfg.rank);
            const Matrix trimmed = trim(masked(M, mask, false), mask, cfg.p);
            const Vector sigma_obs = svd(trimmed).singular_values;
            // full SVD, not power iteration: the Weyl comparison needs the
            // deviation norm from above, and power iteration approaches it
            // from below on clustered spectra
            const double dev = svd(Matrix(trimmed / cfg.p - M)).singular_values(0);
            // Weyl: |sigma_i(trimmed)/p - sigma_i(M)| <= ||trimmed/p - M||
            // for every i; the slack only absorbs roundoff.
            double weyl_gap = 0.0;
            for (index_t i = 0; i < sigma_true.size(); ++i)
                weyl_gap = std::max(
                    weyl_gap, std::abs(sigma_obs(i) / cfg.p - sigma_true(i)) - dev);
            TrialRecord& rec = out.records[t];
            rec.experiment = cfg.experiment;
            rec.n = cfg.n;
            rec.r = cfg.rank;
            rec.p = cfg.p;
            rec.seed = ts;
            rec.rel_error = (est - M).norm() / normM;
            rec.success = rec.rel_error <= kSuccessThreshold;
            rec.wall_time = sw.seconds();
            rec.extra["err_frobenius"] = (est - M).norm();
            rec.extra["old_bound"] = bounds.old_bound;
            rec.extra["new_bound"] = bounds.new_bound;
            rec.extra["spectral_deviation"] = dev;
            rec.extra["weyl_ok"] =
                weyl_gap <= 1e-10 * std::max(1.0, dev) ? 1.0 : 0.0;
        });
        return out;
    }

    if (cfg.experiment == "structured") {
        if (cfg.n % cfg.rank != 0)
            throw parameter_error(
                "run_experiment: structured needs the cluster count to divide n");
        const std::vector<index_t> sizes(static_cast<std::size_t>(cfg.rank),
                                         cfg.n / cfg.rank);
        out.records.resize(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t t) {
            const RngSeed ts = trial_seed(0, static_cast<int>(t));
            detail::StopWatch sw;
            const ClusteringInstance inst =
                gen_clustering(cfg.n, sizes, cfg.noise_dims, derive_seed(ts, 1));
            const ObservationMask mask =
                sample_bernoulli(cfg.n, cfg.n, cfg.p, true, derive_seed(ts, 2));
            const SolverResult res = complete_structured(
                inst.affinity, mask, inst.side_basis, inst.side_basis, cfg.solver);
            const Matrix Mhat =
                inst.side_basis * res.estimate * inst.side_basis.transpose();
            TrialRecord& rec = out.records[t];
            rec.experiment = cfg.experiment;
            rec.n = cfg.n;
            rec.r = cfg.rank;
            rec.p = cfg.p;
            rec.seed = ts;
            rec.rel_error = (Mhat - inst.affinity).norm() / inst.affinity.norm();
            rec.success = rec.rel_error <= kSuccessThreshold && res.converged;
            rec.wall_time = sw.seconds();
            rec.extra["iterations"] = static_cast<double>(res.iterations);
            rec.extra["final_residual"] = res.final_residual;
            rec.extra["side_rank"] = static_cast<double>(inst.side_basis.cols());
            if (t == 0) {
                out.sample_estimate = res.estimate;
                out.sample_iterations = res.iterations;
                out.sample_residual = res.final_residual;
                out.sample_converged = res.converged;
            }
        });
        return out;
    }

    if (cfg.experiment == "decompose" || cfg.experiment == "clique") {
        std::vector<index_t> sizes;
        if (cfg.experiment == "decompose")
            sizes = {cfg.rank};
        else
            sizes = {cfg.clique_small, cfg.clique_large};
        for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
            const index_t n_min = sizes[gi];
            if (n_min > cfg.n)
                throw parameter_error("run_experiment: clique size exceeds n");
            std::vector<TrialRecord> recs(static_cast<std::size_t>(cfg.trials));
            parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers,
                         [&](std::size_t t) {
                const RngSeed ts = trial_seed(static_cast<RngSeed>(gi), static_cast<int>(t));
                detail::StopWatch sw;
                const PlantedCliqueInstance inst =
                    gen_planted_clique(cfg.n, n_min, derive_seed(ts, 1));
                const DecompositionResult res =
                    decompose(inst.reduced, {}, cfg.solver);
                TrialRecord& rec = recs[t];
                rec.experiment = cfg.experiment;
                rec.n = cfg.n;
                rec.r = n_min;
                rec.p = 1.0;  // the reduced matrix is fully observed
                rec.seed = ts;
                rec.rel_error =
                    (res.low_rank - inst.L_true).norm() / inst.L_true.norm();
                rec.success = rec.rel_error <= kSuccessThreshold && res.converged;
                rec.wall_time = sw.seconds();
                rec.extra["iterations"] = static_cast<double>(res.iterations);
                rec.extra["lambda"] = res.lambda_used;
                rec.extra["final_residual"] = res.final_residual;
                rec.extra["clique_recovered"] =
                    clique_nodes(res.low_rank) == inst.clique ? 1.0 : 0.0;
                if (gi == 0 && t == 0) {
                    out.sample_estimate = res.low_rank;
                    out.sample_iterations = res.iterations;
                    out.sample_residual = res.final_residual;
                    out.sample_converged = res.converged;
                    out.sample_lambda = res.lambda_used;
                }
            });
            for (auto& rec : recs) out.records.push_back(std::move(rec));
        }
        return out;
    }

    if (cfg.experiment == "certify") {
        const int k0 =
            static_cast<int>(std::ceil(20.0 * std::log(static_cast<double>(cfg.n))));
        out.records.resize(static_cast<std::size_t>(cfg.trials));
        out.certificates.resize(static_cast<std::size_t>(cfg.trials));
        parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t t) {
            const RngSeed ts = trial_seed(0, static_cast<int>(t));
            detail::StopWatch sw;
            const LowRankInstance inst =
                gen_random_low_rank(cfg.n, cfg.n, cfg.rank, derive_seed(ts, 1));
            const GolfingPartition part =
                golfing_partition(cfg.n, cfg.n, cfg.p, k0, derive_seed(ts, 2));
            const ObservationMask mask = part.union_mask();
            const GolfingCertificate cert = build_golfing_certificate(inst.S, part);
            CertificateReport rep;
            bool stagnated = false;
            try {
                rep = verify_conditions(inst.M, inst.S, mask, cert.Y, derive_seed(ts, 3));
            } catch (const numerical_error&) {
                // Operator-norm estimation can stagnate on near-degenerate
                // spectra; the trial then has no verdict and counts as a
                // failure rather than aborting the campaign.
                stagnated = true;
                const double nan = std::nan("");
                rep.op_norm_tangent = nan;
                rep.cond2a_value = nan;
                rep.cond2b_value = nan;
                rep.thresholds[2] =
                    1.0 / (4.0 * static_cast<double>(cfg.n));
            }
            rep.dk_frobenius_trace = cert.dk_trace;
            bool halving = true;
            const double sqrt_r = std::sqrt(static_cast<double>(cfg.rank));
            // 1e-12 relative slack: ||D_0||_F equals the bound sqrt(r) up to
            // roundoff, so a strict comparison would flip on accumulation
            // noise alone.
            for (std::size_t k = 0; k < rep.dk_frobenius_trace.size(); ++k)
                halving = halving && rep.dk_frobenius_trace[k] <=
                                         std::pow(0.5, static_cast<double>(k)) * sqrt_r *
                                             (1.0 + 1e-12);
            TrialRecord& rec = out.records[t];
            rec.experiment = cfg.experiment;
            rec.n = cfg.n;
            rec.r = cfg.rank;
            rec.p = cfg.p;
            rec.seed = ts;
            rec.rel_error = rep.all_pass() ? 0.0 : 1.0;
            rec.success = rep.all_pass();
            rec.wall_time = sw.seconds();
            rec.extra["op_norm"] = rep.op_norm_tangent;
            rec.extra["cond2a"] = rep.cond2a_value;
            rec.extra["cond2b"] = rep.cond2b_value;
            rec.extra["threshold_2b"] = rep.thresholds[2];
            rec.extra["halving_ok"] = halving ? 1.0 : 0.0;
            rec.extra["k0"] = static_cast<double>(part.k0);
            rec.extra["q"] = part.q;
            rec.extra["stagnated"] = stagnated ? 1.0 : 0.0;
            out.certificates[t] = std::move(rep);
        });
        return out;
    }

    throw parameter_error("run_experiment: unknown experiment '" + cfg.experiment + "'");
}

} // namespace lowrank
