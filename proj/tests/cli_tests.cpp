// End-to-end tests of the command-line binary. The binary path arrives as
// argv[1]; everything runs inside a scratch directory under the build tree.
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include "corank/data_io.hpp"
#include "corank/konijn.hpp"
#include "corank/scores.hpp"
#include "corank/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "ok: " << what << '\n';
    } else {
        ++failures;
        std::cout << "FAILED: " << what << '\n';
    }
}

std::string binary;
fs::path scratch;

/// Run the CLI, capture stdout into out; return the exit code.
int run(const std::string& args, std::string& out) {
    const fs::path out_file = scratch / "stdout.txt";
    const std::string command = binary + " " + args + " > " +
                                out_file.string() + " 2> " +
                                (scratch / "stderr.txt").string();
    const int status = std::system(command.c_str());
    std::ifstream in(out_file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    out = buffer.str();
#ifdef _WIN32
    return status;
#else
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void test_generate_and_schema() {
    const fs::path data = scratch / "sample40.csv";
    std::string out;
    int code = run("generate --case a --d1 2 --d2 2 --n 40 --data-seed 5 --out " +
                       data.string(),
                   out);
    check(code == 0, "generate exits 0");
    const corank::DataTable table = corank::read_data_csv(data.string());
    check(table.columns ==
              std::vector<std::string>{"x1_1", "x1_2", "x2_1", "x2_2"},
          "generated CSV header");
    check(table.rows.size() == 40, "generated CSV has n rows");

    code = run("test --input " + data.string() + " --d1 2 --d2 2", out);
    check(code == 0, "test exits 0 on valid input");
    const json report = json::parse(out);
    check(report["n"] == 40 && report["d1"] == 2 && report["d2"] == 2,
          "JSON header fields");
    check(report["results"].size() == 5, "five tests by default");
    for (const auto& result : report["results"]) {
        const double p = result["pvalue"];
        check(result.contains("name") && result.contains("statistic") &&
                  result.contains("df") && result.contains("method") &&
                  p >= 0.0 && p <= 1.0,
              "result schema for " + result["name"].get<std::string>());
        check(result["df"] == 4, "df is d1*d2");
    }

    // determinism: identical invocations give identical bytes
    std::string again;
    run("test --input " + data.string() + " --d1 2 --d2 2", again);
    check(out == again, "test output is deterministic");
}

void test_perfect_dependence() {
    // X2 = X1 with continuous data: every rank test should scream
    corank::PhiloxEngine rng(42, 0);
    corank::NormalSampler normal(rng);
    std::vector<corank::Vec> block(432, corank::Vec(2));
    for (auto& row : block)
        for (double& x : row) x = normal();
    const fs::path data = scratch / "dependent.csv";
    {
        std::ofstream out(data);
        corank::write_data_csv(block, block, out);
    }
    std::string out;
    const int code = run("test --input " + data.string() +
                             " --d1 2 --d2 2 --tests sign,spearman,kendall,vdw",
                         out);
    check(code == 0, "dependent-data test exits 0");
    const json report = json::parse(out);
    bool all_tiny = true;
    for (const auto& result : report["results"])
        all_tiny = all_tiny && result["pvalue"].get<double>() < 0.001;
    check(all_tiny, "perfect dependence yields p < 0.001 for all rank tests");
}

void test_input_errors() {
    std::string out;
    check(run("test --input " + (scratch / "missing.csv").string() +
                  " --d1 1 --d2 1",
              out) == 2,
          "missing input file exits 2");

    const fs::path bad = scratch / "bad.csv";
    {
        std::ofstream f(bad);
        f << "a,b\n1.0,2.0\n1.5,oops\n2.0,3.0\n2.5,4.0\n";
    }
    check(run("test --input " + bad.string() + " --d1 1 --d2 1", out) == 2,
          "non-numeric cell exits 2");

    const fs::path narrow = scratch / "narrow.csv";
    {
        std::ofstream f(narrow);
        f << "a,b\n1.0,2.0\n1.5,2.5\n2.0,3.0\n2.5,4.0\n";
    }
    check(run("test --input " + narrow.string() + " --d1 2 --d2 2", out) == 2,
          "column count mismatch exits 2");

    const fs::path dupes = scratch / "dupes.csv";
    {
        std::ofstream f(dupes);
        f << "a,b\n1.0,2.0\n1.0,2.5\n2.0,3.0\n2.5,4.0\n";
    }
    check(run("test --input " + dupes.string() + " --d1 1 --d2 1", out) == 2,
          "duplicate rows within a block exit 2");
}

void test_permutation_method() {
    const fs::path data = scratch / "perm_sample.csv";
    std::string out;
    run("generate --case a --d1 1 --d2 1 --n 24 --data-seed 9 --out " +
            data.string(),
        out);
    const std::string cache = (scratch / "cache").string();
    const int code = run("test --input " + data.string() +
                             " --d1 1 --d2 1 --tests spearman,vdw "
                             "--method permutation --B 499 --null-seed 11 "
                             "--cache-dir " + cache,
                         out);
    check(code == 0, "permutation method exits 0");
    const json report = json::parse(out);
    for (const auto& result : report["results"]) {
        const std::string method = result["method"];
        const double p = result["pvalue"];
        check(method.rfind("permutation", 0) == 0, "method label");
        // add-one p-value lattice: multiples of 1/(B+1)
        const double scaled = p * 500.0;
        check(std::fabs(scaled - std::round(scaled)) < 1e-9 && p > 0.0,
              "permutation p on the add-one lattice");
    }
}

void test_critval_cache() {
    const std::string cache = (scratch / "critcache").string();
    std::string first, second;
    int code = run("critval --n 4 --d1 1 --d2 1 --tests sign --exhaustive "
                   "--cache-dir " + cache,
                   first);
    check(code == 0, "critval exits 0");
    check(first.find("test,q90,q95,q99") == 0, "critval header");
    // exact enumeration: the 0.95 quantile of the n = 4 sign null is 4
    check(first.find("sign,4,4,4") != std::string::npos,
          "exhaustive micro-table quantiles (q90=q95=q99=4)");

    bool cache_file_found = false;
    for (const auto& entry : fs::directory_iterator(cache))
        cache_file_found |= entry.path().extension() == ".csv";
    check(cache_file_found, "critval wrote a cache file");

    code = run("critval --n 4 --d1 1 --d2 1 --tests sign --exhaustive "
               "--cache-dir " + cache,
               second);
    check(code == 0 && first == second, "cached critval reproduces bytes");

    // asymptotic cross-check: at finite n the vdW null is the chi-square(4)
    // law deflated by the squared ratio of the grid score variance to its
    // limit, times n/(n-1); the simulated 0.95 quantile should land close
    // to the adjusted quantile
    std::string out;
    code = run("critval --n 432 --d1 2 --d2 2 --tests vdw --B 10000 "
               "--null-seed 3 --cache-dir " + cache,
               out);
    check(code == 0, "large critval exits 0");
    const auto line_start = out.find("vdw,");
    double q90 = 0.0, q95 = 0.0, q99 = 0.0;
    std::sscanf(out.c_str() + line_start, "vdw,%lf,%lf,%lf", &q90, &q95, &q99);
    const corank::Grid grid = corank::build_grid(432, 2, 1);
    const corank::RanksSigns rs =
        corank::ranks_signs_from_images(grid.points, grid.spec.n_radii);
    const corank::ScoreFunction vdw =
        corank::make_score(corank::ScoreKind::vdw, 2);
    double shat = 0.0;
    for (double u : rs.rescaled_ranks) shat += vdw(u) * vdw(u);
    shat /= 432.0;
    const double ratio = shat / vdw.sigma2;
    const double reference = 9.4877290368 * ratio * ratio * 432.0 / 431.0;
    check(std::fabs(q95 - reference) < 0.05 * reference,
          "simulated vdW q95 within 5% of the scale-adjusted chi-square(4) "
          "quantile");
}

void test_power_thread_invariance() {
    const std::string common =
        "power --case a --d1 1 --d2 1 --n 40 --taus 0,0.5 --reps 20 "
        "--tests sign,wilks --grid-seed 1 --data-seed 2";
    std::string one, four;
    check(run(common + " --threads 1", one) == 0, "power exits 0");
    check(run(common + " --threads 4", four) == 0, "threaded power exits 0");
    check(one == four, "power output independent of thread count");
    check(one.find("test,tau=0,tau=0.5") == 0, "power CSV header");
}

void test_null_pvalue_uniformity() {
    // under independence the asymptotic Spearman p-value should look
    // uniform; Kolmogorov-Smirnov over 200 independent runs at the 1% level
    std::vector<double> pvalues;
    for (int seed = 1; seed <= 200; ++seed) {
        const fs::path data = scratch / "null_run.csv";
        std::string out;
        run("generate --case a --d1 1 --d2 1 --n 100 --data-seed " +
                std::to_string(seed) + " --out " + data.string(),
            out);
        run("test --input " + data.string() + " --d1 1 --d2 1 --tests spearman",
            out);
        pvalues.push_back(json::parse(out)["results"][0]["pvalue"]);
    }
    std::sort(pvalues.begin(), pvalues.end());
    double ks = 0.0;
    const int n = static_cast<int>(pvalues.size());
    for (int i = 0; i < n; ++i) {
        ks = std::max(ks, std::fabs((i + 1.0) / n - pvalues[i]));
        ks = std::max(ks, std::fabs(pvalues[i] - static_cast<double>(i) / n));
    }
    // critical value c(0.01) / sqrt(n) with c(0.01) = 1.628
    check(ks < 1.628 / std::sqrt(static_cast<double>(n)),
          "null p-values pass the KS uniformity screen");
}

void test_are_and_omega() {
    std::string out;
    check(run("are --score vdw --radial gaussian --d1 2 --d2 3", out) == 0,
          "are exits 0");
    const json report = json::parse(out);
    check(std::fabs(report["are"].get<double>() - 1.0) < 1e-6,
          "vdW/Gaussian ARE is 1");

    check(run("omega-table --d-max 2", out) == 0, "omega-table exits 0");
    check(out.find("d1,d2,omega") == 0, "omega-table header");
    check(out.find("1,1,0.8561345892") != std::string::npos,
          "omega(1,1) value");

    check(run("are --score vdw --radial t --nu 0 --d1 1 --d2 1", out) != 0,
          "invalid nu fails");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-binary>\n";
        return 2;
    }
    binary = argv[1];
    scratch = fs::temp_directory_path() / "corank_cli_tests";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    test_generate_and_schema();
    test_perfect_dependence();
    test_input_errors();
    test_permutation_method();
    test_critval_cache();
    test_power_thread_invariance();
    test_null_pvalue_uniformity();
    test_are_and_omega();

    fs::remove_all(scratch);
    if (failures) {
        std::cout << failures << " check(s) failed\n";
        return 1;
    }
    std::cout << "all CLI checks passed\n";
    return 0;
}
