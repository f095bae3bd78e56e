// Monte Carlo power study: rejection frequencies of the rank tests and the
// Wilks benchmark under Konijn local alternatives, mirroring the layout of
// a tests-by-tau table.
//
// Replicates are keyed by (data seed, replicate stream) and may be spread
// over a worker pool; the aggregate is independent of scheduling.
#pragma once

#include <atomic>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "corank/grid.hpp"
#include "corank/konijn.hpp"
#include "corank/nulldist.hpp"
#include "corank/stats.hpp"
#include "corank/transport.hpp"

namespace corank {

enum class TestChoice { sign, spearman, kendall, vdw, wilks };

inline std::string test_choice_name(TestChoice test) {
    switch (test) {
        case TestChoice::sign: return "sign";
        case TestChoice::spearman: return "spearman";
        case TestChoice::kendall: return "kendall";
        case TestChoice::vdw: return "vdw";
        case TestChoice::wilks: return "wilks";
    }
    return "?";
}

struct PowerStudyConfig {
    MarginalKind marginal = MarginalKind::gaussian;
    int nu = 3;
    int d1 = 2, d2 = 2;
    int n = 432;
    std::vector<double> taus{0.0};
    int replications = 1000;
    double alpha = 0.05;
    std::vector<TestChoice> tests{TestChoice::sign, TestChoice::spearman,
                                  TestChoice::kendall, TestChoice::vdw,
                                  TestChoice::wilks};
    std::uint64_t grid_seed = 1;
    std::uint64_t data_seed = 2;
    std::uint64_t null_seed = 3;
    int null_draws = 10000;  // pairings behind each exact critical value
    int threads = 1;
};

struct PowerTable {
    std::vector<TestChoice> tests;       // rows
    std::vector<double> taus;            // columns
    std::vector<double> rejection_rate;  // row-major tests x taus
};

inline PowerTable run_power_study(const PowerStudyConfig& config) {
    if (config.replications < 1)
        throw std::invalid_argument("run_power_study: need replications >= 1");
    const bool needs_ranks = [&] {
        for (TestChoice t : config.tests)
            if (t != TestChoice::wilks) return true;
        return false;
    }();

    // Grids are data-independent: one per block dimension, shared by all
    // replicates.
    Grid grid1, grid2;
    if (needs_ranks) {
        grid1 = build_grid(config.n, config.d1, config.grid_seed);
        grid2 = config.d2 == config.d1
                    ? grid1
                    : build_grid(config.n, config.d2, config.grid_seed);
    }
    // The rank statistics are distribution-free, so their exact critical
    // values come from one simulated null table each, shared by every
    // replicate and tau. Wilks has no distribution-free null and keeps the
    // asymptotic chi-square quantile.
    const std::vector<double> critical = [&] {
        std::vector<double> crit(config.tests.size());
        for (std::size_t t = 0; t < config.tests.size(); ++t) {
            if (config.tests[t] == TestChoice::wilks) {
                crit[t] =
                    chi2_quantile(1.0 - config.alpha, config.d1 * config.d2);
                continue;
            }
            const RankTest kind = [&] {
                switch (config.tests[t]) {
                    case TestChoice::sign: return RankTest::sign;
                    case TestChoice::spearman: return RankTest::spearman;
                    case TestChoice::kendall: return RankTest::kendall;
                    default: return RankTest::vdw;
                }
            }();
            const NullTable table = simulate_null(
                kind, grid1, grid2, config.null_draws, config.null_seed);
            crit[t] = null_quantile(table, 1.0 - config.alpha);
        }
        return crit;
    }();

    const std::size_t n_tests = config.tests.size();
    const std::size_t n_taus = config.taus.size();
    const std::size_t cells = n_tests * n_taus;
    const std::size_t total_jobs = n_taus * config.replications;

    std::vector<std::atomic<long>> rejections(cells);
    for (auto& r : rejections) r.store(0);
    std::atomic<std::size_t> next_job{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t job = next_job.fetch_add(1);
            if (job >= total_jobs) return;
            const std::size_t tau_index = job / config.replications;
            const std::size_t rep = job % config.replications;
            const double tau = config.taus[tau_index];
            const double delta = tau / std::sqrt(static_cast<double>(config.n));

            const KonijnConfig konijn = KonijnConfig::identity_case(
                config.d1, config.d2, config.marginal, delta);
            KonijnConfig with_nu = konijn;
            with_nu.nu = config.nu;
            const PairedSample sample =
                generate(with_nu, config.n, config.data_seed,
                         /*stream=*/tau_index * config.replications + rep + 1);

            RanksSigns rs1, rs2;
            if (needs_ranks) {
                rs1 = center_outward(sample.block1, grid1);
                rs2 = center_outward(sample.block2, grid2);
            }
            for (std::size_t t = 0; t < n_tests; ++t) {
                double statistic;
                switch (config.tests[t]) {
                    case TestChoice::wilks:
                        statistic = wilks(sample.block1, sample.block2).statistic;
                        break;
                    case TestChoice::sign:
                        statistic = rank_test(RankTest::sign, rs1, rs2).statistic;
                        break;
                    case TestChoice::spearman:
                        statistic =
                            rank_test(RankTest::spearman, rs1, rs2).statistic;
                        break;
                    case TestChoice::kendall:
                        statistic =
                            rank_test(RankTest::kendall, rs1, rs2).statistic;
                        break;
                    case TestChoice::vdw:
                        statistic = rank_test(RankTest::vdw, rs1, rs2).statistic;
                        break;
                    default:
                        throw std::logic_error("run_power_study: bad test");
                }
                if (statistic > critical[t])
                    rejections[t * n_taus + tau_index].fetch_add(1);
            }
        }
    };

    const int n_threads = std::max(1, config.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    PowerTable table;
    table.tests = config.tests;
    table.taus = config.taus;
    table.rejection_rate.resize(cells);
    for (std::size_t k = 0; k < cells; ++k)
        table.rejection_rate[k] =
            static_cast<double>(rejections[k].load()) / config.replications;
    return table;
}

/// CSV layout: rows = tests, columns = tau values.
inline void write_power_csv(const PowerTable& table, std::ostream& out) {
    out << "test";
    out << std::setprecision(6);
    for (double tau : table.taus) out << ",tau=" << tau;
    out << '\n';
    for (std::size_t t = 0; t < table.tests.size(); ++t) {
        out << test_choice_name(table.tests[t]);
        for (std::size_t c = 0; c < table.taus.size(); ++c)
            out << ',' << table.rejection_rate[t * table.taus.size() + c];
        out << '\n';
    }
}

}  // namespace corank
