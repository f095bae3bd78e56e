// Command-line front end: independence tests on CSV data, power studies,
// null-table management, efficiency reports, and sample generation.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/corank.hpp"

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<corank::TestChoice> parse_tests(const std::string& csv) {
    std::vector<corank::TestChoice> tests;
    std::stringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token == "sign") tests.push_back(corank::TestChoice::sign);
        else if (token == "spearman") tests.push_back(corank::TestChoice::spearman);
        else if (token == "kendall") tests.push_back(corank::TestChoice::kendall);
        else if (token == "vdw") tests.push_back(corank::TestChoice::vdw);
        else if (token == "wilks") tests.push_back(corank::TestChoice::wilks);
        else throw InputError("unknown test '" + token + "'");
    }
    if (tests.empty()) throw InputError("no tests selected");
    return tests;
}

std::vector<double> parse_taus(const std::string& csv) {
    std::vector<double> taus;
    std::stringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) {
        std::size_t used = 0;
        taus.push_back(std::stod(token, &used));
        if (used != token.size()) throw InputError("bad tau '" + token + "'");
    }
    if (taus.empty()) throw InputError("no tau values");
    return taus;
}

corank::MarginalKind case_marginal(const std::string& name) {
    if (name == "a") return corank::MarginalKind::gaussian;
    if (name == "b") return corank::MarginalKind::elliptical_t;
    if (name == "c") return corank::MarginalKind::independent_t;
    if (name == "d") return corank::MarginalKind::chi2_1_components;
    throw InputError("case must be one of a, b, c, d");
}

corank::RankTest to_rank_test(corank::TestChoice choice) {
    switch (choice) {
        case corank::TestChoice::sign: return corank::RankTest::sign;
        case corank::TestChoice::spearman: return corank::RankTest::spearman;
        case corank::TestChoice::kendall: return corank::RankTest::kendall;
        case corank::TestChoice::vdw: return corank::RankTest::vdw;
        default: throw InputError("wilks has no permutation null table");
    }
}

std::unique_ptr<std::ofstream> open_output(const std::string& path,
                                           std::ostream*& out) {
    if (path.empty()) {
        out = &std::cout;
        return nullptr;
    }
    auto file = std::make_unique<std::ofstream>(path);
    if (!*file) throw InputError("cannot open output file " + path);
    out = file.get();
    return file;
}

/// Fetch a cached null table or simulate/enumerate and cache it.
corank::NullTable cached_null_table(const std::string& cache_dir,
                                    corank::RankTest test,
                                    const corank::Grid& grid1,
                                    const corank::Grid& grid2, int draws,
                                    std::uint64_t null_seed, bool exhaustive) {
    std::filesystem::create_directories(cache_dir);
    const std::string key = corank::null_table_key(
        test, grid1.spec.n, grid1.spec.d, grid2.spec.d, grid1.seed, draws,
        null_seed, exhaustive);
    const std::string path = cache_dir + "/" + key + ".csv";
    corank::NullTable table;
    if (corank::read_null_table(path, table)) return table;
    table = exhaustive ? corank::enumerate_null(test, grid1, grid2)
                       : corank::simulate_null(test, grid1, grid2, draws,
                                               null_seed);
    corank::write_null_table(table, path);
    return table;
}

int cmd_test(const std::string& input, int d1, int d2,
             const std::string& tests_csv, const std::string& method, int draws,
             std::uint64_t grid_seed, std::uint64_t null_seed,
             const std::string& cache_dir, const std::string& out_path) {
    const auto tests = parse_tests(tests_csv);

    std::vector<corank::Vec> block1, block2;
    try {
        const corank::DataTable table = corank::read_data_csv(input);
        if (static_cast<int>(table.rows.size()) < 4)
            throw InputError("need at least 4 observations");
        corank::split_blocks(table, d1, d2, block1, block2);
    } catch (const std::runtime_error& err) {
        // malformed or missing data is an input error, not a numerical one
        throw InputError(err.what());
    }
    for (const auto* block : {&block1, &block2})
        for (std::size_t i = 0; i < block->size(); ++i)
            for (std::size_t j = i + 1; j < block->size(); ++j)
                if ((*block)[i] == (*block)[j])
                    throw InputError("duplicate rows within a block (rows " +
                                     std::to_string(i + 1) + " and " +
                                     std::to_string(j + 1) + ")");

    const int n = static_cast<int>(block1.size());
    const bool permutation = method == "permutation";
    if (!permutation && method != "asymptotic")
        throw InputError("method must be asymptotic or permutation");
    if (permutation && draws < 100) throw InputError("need B >= 100");

    bool needs_ranks = false;
    for (auto t : tests) needs_ranks |= t != corank::TestChoice::wilks;

    corank::Grid grid1, grid2;
    corank::RanksSigns rs1, rs2;
    if (needs_ranks) {
        grid1 = corank::build_grid(n, d1, grid_seed);
        grid2 = d2 == d1 ? grid1 : corank::build_grid(n, d2, grid_seed);
        rs1 = corank::center_outward(block1, grid1);
        rs2 = corank::center_outward(block2, grid2);
    }

    std::vector<corank::TestResult> results;
    for (auto choice : tests) {
        corank::TestResult result;
        if (choice == corank::TestChoice::wilks) {
            result = corank::wilks(block1, block2);
        } else {
            result = corank::rank_test(to_rank_test(choice), rs1, rs2);
            if (permutation) {
                const corank::NullTable table = cached_null_table(
                    cache_dir, to_rank_test(choice), grid1, grid2, draws,
                    null_seed, false);
                result.pvalue = corank::exact_pvalue(table, result.statistic);
                std::ostringstream label;
                label << "permutation(B=" << draws << ",seed=" << null_seed
                      << ")";
                result.method = label.str();
            }
        }
        results.push_back(std::move(result));
    }

    std::ostream* out = nullptr;
    auto file = open_output(out_path, out);
    *out << "{\"n\":" << n << ",\"d1\":" << d1 << ",\"d2\":" << d2
         << ",\"results\":[";
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (k) *out << ',';
        *out << corank::to_json(results[k]);
    }
    *out << "]}\n";
    return 0;
}

int cmd_power(const std::string& case_name, int d1, int d2, int n,
              const std::string& taus_csv, int reps, double alpha,
              const std::string& tests_csv, std::uint64_t grid_seed,
              std::uint64_t data_seed, std::uint64_t null_seed,
              int null_draws, int threads, const std::string& out_path) {
    corank::PowerStudyConfig config;
    config.marginal = case_marginal(case_name);
    config.d1 = d1;
    config.d2 = d2;
    config.n = n;
    config.taus = parse_taus(taus_csv);
    config.replications = reps;
    config.alpha = alpha;
    config.tests = parse_tests(tests_csv);
    config.grid_seed = grid_seed;
    config.data_seed = data_seed;
    config.null_seed = null_seed;
    config.null_draws = null_draws;
    config.threads = threads;

    const corank::PowerTable table = corank::run_power_study(config);
    std::ostream* out = nullptr;
    auto file = open_output(out_path, out);
    corank::write_power_csv(table, *out);
    return 0;
}

int cmd_critval(int n, int d1, int d2, const std::string& tests_csv, int draws,
                std::uint64_t grid_seed, std::uint64_t null_seed,
                const std::string& cache_dir, bool exhaustive,
                const std::string& out_path) {
    const auto tests = parse_tests(tests_csv);
    const corank::Grid grid1 = corank::build_grid(n, d1, grid_seed);
    const corank::Grid grid2 =
        d2 == d1 ? grid1 : corank::build_grid(n, d2, grid_seed);

    std::ostream* out = nullptr;
    auto file = open_output(out_path, out);
    *out << "test,q90,q95,q99\n" << std::setprecision(15);
    for (auto choice : tests) {
        const corank::NullTable table =
            cached_null_table(cache_dir, to_rank_test(choice), grid1, grid2,
                              draws, null_seed, exhaustive);
        *out << corank::test_choice_name(choice) << ','
             << corank::null_quantile(table, 0.90) << ','
             << corank::null_quantile(table, 0.95) << ','
             << corank::null_quantile(table, 0.99) << '\n';
    }
    return 0;
}

corank::ScoreFunction parse_score(const std::string& name, int d) {
    if (name == "sign") return corank::make_score(corank::ScoreKind::sign);
    if (name == "wilcoxon" || name == "spearman")
        return corank::make_score(corank::ScoreKind::wilcoxon);
    if (name == "vdw") return corank::make_score(corank::ScoreKind::vdw, d);
    throw InputError("score must be sign, wilcoxon, or vdw");
}

corank::RadialSpec parse_radial(const std::string& name, int nu) {
    corank::RadialSpec radial;
    if (name == "gaussian") {
        radial.family = corank::RadialFamily::gaussian;
    } else if (name == "t") {
        radial.family = corank::RadialFamily::student_t;
        radial.nu = nu;
    } else {
        throw InputError("radial must be gaussian or t");
    }
    return radial;
}

std::vector<double> load_matrix(const std::string& path, int rows, int cols) {
    if (path.empty()) {
        // identity (rectangular: ones on the main diagonal)
        std::vector<double> m(static_cast<std::size_t>(rows) * cols, 0.0);
        for (int i = 0; i < std::min(rows, cols); ++i)
            m[static_cast<std::size_t>(i) * cols + i] = 1.0;
        return m;
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot open matrix file " + path);
    const auto points = corank::read_points_csv(in);
    if (static_cast<int>(points.size()) != rows ||
        (rows > 0 && static_cast<int>(points.front().size()) != cols))
        throw InputError("matrix in " + path + " is not " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    std::vector<double> m;
    m.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : points) m.insert(m.end(), row.begin(), row.end());
    return m;
}

int cmd_are(const std::string& score_name, const std::string& radial_name,
            int nu, int d1, int d2, const std::string& sigma1_path,
            const std::string& sigma2_path, const std::string& m1_path,
            const std::string& m2_path, const std::string& out_path) {
    const auto score1 = parse_score(score_name, d1);
    const auto score2 = parse_score(score_name, d2);
    const auto radial = parse_radial(radial_name, nu);
    const auto sigma1 = load_matrix(sigma1_path, d1, d1);
    const auto sigma2 = load_matrix(sigma2_path, d2, d2);
    const auto m1 = load_matrix(m1_path, d1, d2);
    const auto m2 = load_matrix(m2_path, d2, d1);

    const corank::EfficiencyReport report = corank::are_elliptical(
        score1, score2, radial, radial, d1, d2, sigma1, sigma2, m1, m2);

    std::ostream* out = nullptr;
    auto file = open_output(out_path, out);
    *out << std::setprecision(15) << "{\"score\":\"" << score_name
         << "\",\"radial\":\"" << radial_name << "\"";
    if (radial.family == corank::RadialFamily::student_t)
        *out << ",\"nu\":" << nu;
    *out << ",\"d1\":" << d1 << ",\"d2\":" << d2 << ",\"C1\":" << report.c1
         << ",\"C2\":" << report.c2 << ",\"D1\":" << report.d_moment1
         << ",\"D2\":" << report.d_moment2 << ",\"are\":" << report.are
         << "}\n";
    return 0;
}

int cmd_omega_table(int d_max, const std::string& out_path) {
    std::ostream* out = nullptr;
    auto file = open_output(out_path, out);
    *out << "d1,d2,omega\n" << std::setprecision(10);
    for (int d1 = 1; d1 <= d_max; ++d1)
        for (int d2 = 1; d2 <= d_max; ++d2)
            *out << d1 << ',' << d2 << ',' << corank::omega(d1, d2) << '\n';
    return 0;
}

int cmd_generate(const std::string& case_name, int d1, int d2, int n,
                 double tau, std::uint64_t data_seed,
                 const std::string& out_path) {
    const double delta = tau / std::sqrt(static_cast<double>(n));
    const corank::KonijnConfig config = corank::KonijnConfig::identity_case(
        d1, d2, case_marginal(case_name), delta);
    const corank::PairedSample sample = corank::generate(config, n, data_seed);
    std::ostream* out = nullptr;
    auto file = open_output(out_path, out);
    corank::write_data_csv(sample.block1, sample.block2, *out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "corank: distribution-free independence tests between random vectors "
        "via center-outward ranks and signs"};
    app.require_subcommand(1);

    // common option storage
    std::string input, out_path, tests_csv = "sign,spearman,kendall,vdw,wilks";
    std::string method = "asymptotic", case_name = "a", cache_dir = "corank-cache";
    std::string taus_csv = "0";
    std::string score_name = "vdw", radial_name = "gaussian";
    std::string sigma1_path, sigma2_path, m1_path, m2_path;
    int d1 = 1, d2 = 1, n = 432, draws = 999, reps = 1000, threads = 1;
    int power_null_draws = 10000;
    int nu = 3, d_max = 10;
    double alpha = 0.05, tau = 0.0;
    std::uint64_t grid_seed = 1, data_seed = 2, null_seed = 3;
    bool exhaustive = false;

    auto* test_cmd = app.add_subcommand(
        "test", "run independence tests on a CSV file");
    test_cmd->add_option("--input", input, "input CSV (header row, d1+d2 columns)")
        ->required();
    test_cmd->add_option("--d1", d1, "dimension of block 1")->required();
    test_cmd->add_option("--d2", d2, "dimension of block 2")->required();
    test_cmd->add_option("--tests", tests_csv, "comma list of tests");
    test_cmd->add_option("--method", method, "asymptotic or permutation");
    test_cmd->add_option("--B", draws, "permutation draws");
    test_cmd->add_option("--grid-seed", grid_seed, "grid construction seed");
    test_cmd->add_option("--null-seed", null_seed, "null simulation seed");
    test_cmd->add_option("--cache-dir", cache_dir, "null-table cache directory");
    test_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* power_cmd = app.add_subcommand(
        "power", "Monte Carlo power study under Konijn alternatives");
    power_cmd->add_option("--case", case_name, "marginal case a|b|c|d");
    power_cmd->add_option("--d1", d1, "dimension of block 1");
    power_cmd->add_option("--d2", d2, "dimension of block 2");
    power_cmd->add_option("--n", n, "sample size");
    power_cmd->add_option("--taus", taus_csv, "comma list of tau values");
    power_cmd->add_option("--reps", reps, "replications per tau");
    power_cmd->add_option("--alpha", alpha, "nominal level");
    power_cmd->add_option("--tests", tests_csv, "comma list of tests");
    power_cmd->add_option("--grid-seed", grid_seed, "grid construction seed");
    power_cmd->add_option("--data-seed", data_seed, "data generation seed");
    power_cmd->add_option("--null-seed", null_seed,
                          "seed for the exact critical-value tables");
    power_cmd->add_option("--null-B", power_null_draws,
                          "pairings per exact critical-value table");
    power_cmd->add_option("--threads", threads, "worker threads");
    power_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* critval_cmd = app.add_subcommand(
        "critval", "simulate (and cache) exact null critical values");
    critval_cmd->add_option("--n", n, "sample size")->required();
    critval_cmd->add_option("--d1", d1, "dimension of block 1")->required();
    critval_cmd->add_option("--d2", d2, "dimension of block 2")->required();
    critval_cmd->add_option("--tests", tests_csv, "comma list of rank tests");
    critval_cmd->add_option("--B", draws, "null draws");
    critval_cmd->add_option("--grid-seed", grid_seed, "grid construction seed");
    critval_cmd->add_option("--null-seed", null_seed, "null simulation seed");
    critval_cmd->add_option("--cache-dir", cache_dir, "cache directory");
    critval_cmd->add_flag("--exhaustive", exhaustive,
                          "enumerate all n! pairings (n <= 8)");
    critval_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* are_cmd = app.add_subcommand(
        "are", "asymptotic relative efficiency vs Wilks (elliptical model)");
    are_cmd->add_option("--score", score_name, "sign, wilcoxon, or vdw");
    are_cmd->add_option("--radial", radial_name, "gaussian or t");
    are_cmd->add_option("--nu", nu, "t degrees of freedom");
    are_cmd->add_option("--d1", d1, "dimension of block 1")->required();
    are_cmd->add_option("--d2", d2, "dimension of block 2")->required();
    are_cmd->add_option("--sigma1", sigma1_path, "d1 x d1 covariance CSV");
    are_cmd->add_option("--sigma2", sigma2_path, "d2 x d2 covariance CSV");
    are_cmd->add_option("--m1", m1_path, "d1 x d2 mixing matrix CSV");
    are_cmd->add_option("--m2", m2_path, "d2 x d1 mixing matrix CSV");
    are_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* omega_cmd = app.add_subcommand(
        "omega-table", "Spearman ARE lower bound Omega(d1, d2) as CSV");
    omega_cmd->add_option("--d-max", d_max, "largest dimension");
    omega_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* generate_cmd = app.add_subcommand(
        "generate", "sample a Konijn alternative to CSV");
    generate_cmd->add_option("--case", case_name, "marginal case a|b|c|d");
    generate_cmd->add_option("--d1", d1, "dimension of block 1")->required();
    generate_cmd->add_option("--d2", d2, "dimension of block 2")->required();
    generate_cmd->add_option("--n", n, "sample size")->required();
    generate_cmd->add_option("--tau", tau, "local parameter (delta = tau/sqrt(n))");
    generate_cmd->add_option("--data-seed", data_seed, "generation seed");
    generate_cmd->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (test_cmd->parsed())
            return cmd_test(input, d1, d2, tests_csv, method, draws, grid_seed,
                            null_seed, cache_dir, out_path);
        if (power_cmd->parsed())
            return cmd_power(case_name, d1, d2, n, taus_csv, reps, alpha,
                             tests_csv, grid_seed, data_seed, null_seed,
                             power_null_draws, threads, out_path);
        if (critval_cmd->parsed())
            return cmd_critval(n, d1, d2, tests_csv, draws, grid_seed,
                               null_seed, cache_dir, exhaustive, out_path);
        if (are_cmd->parsed())
            return cmd_are(score_name, radial_name, nu, d1, d2, sigma1_path,
                           sigma2_path, m1_path, m2_path, out_path);
        if (omega_cmd->parsed()) return cmd_omega_table(d_max, out_path);
        if (generate_cmd->parsed())
            return cmd_generate(case_name, d1, d2, n, tau, data_seed, out_path);
    } catch (const InputError& err) {
        std::cerr << "input error: " << err.what() << '\n';
        return kExitInputError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "input error: " << err.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitNumericalError;
    }
    return 0;
}
