#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rmc/densities.hpp"
#include "rmc/errors.hpp"
#include "rmc/experiment.hpp"
#include "rmc/stats.hpp"

using namespace rmc;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const std::string dir = (fs::temp_directory_path() / ("rmc_test_" + name)).string();
    fs::remove_all(dir);
    return dir;
}

std::map<std::string, std::string> file_hashes(const RunManifest& man, const std::string& dir) {
    std::map<std::string, std::string> out;
    for (const auto& f : man.files)
        if (f.path.size() > 4 && f.path.substr(f.path.size() - 4) == ".csv")
            out[f.path] = fnv1a64_hex_of_file(dir + "/" + f.path);
    return out;
}

}  // namespace

TEST_CASE("single-replica ensemble writes the full matrix") {
    const std::string dir = fresh_dir("single");
    RunConfig cfg;
    cfg.n = 3;
    cfg.t_values = {1};
    cfg.replicas = 1;
    cfg.master_seed = 5;
    cfg.observables = {"columns"};
    cfg.out_dir = dir;
    const RunManifest man = run_ensemble(cfg);
    const CsvTable t = read_csv(dir + "/columns_t1.csv");
    REQUIRE(t.header.size() == 10);  // replica + n^2 entries
    REQUIRE(t.rows.size() == 1);
    double sum = 0.0;
    for (int k = 1; k <= 9; k++) sum += std::strtod(t.rows[0][k].c_str(), nullptr);
    CHECK(sum == doctest::Approx(3.0).epsilon(1e-12));  // three stochastic columns
}

TEST_CASE("identical configs give identical bytes; workers do not matter") {
    RunConfig cfg;
    cfg.n = 4;
    cfg.a = 2.0;
    cfg.t_values = {1, 3};
    cfg.replicas = 200;
    cfg.master_seed = 99;
    cfg.observables = {"columns", "distance", "exponents", "spectrum", "perron", "curve"};

    const std::string d1 = fresh_dir("det1"), d2 = fresh_dir("det2"), d3 = fresh_dir("det3");
    cfg.out_dir = d1;
    cfg.workers = 1;
    const auto h1 = file_hashes(run_ensemble(cfg), d1);
    cfg.out_dir = d2;
    cfg.workers = 2;
    const auto h2 = file_hashes(run_ensemble(cfg), d2);
    cfg.out_dir = d3;
    cfg.workers = 2;
    const auto h3 = file_hashes(run_ensemble(cfg), d3);
    CHECK(h1 == h2);
    CHECK(h2 == h3);
    CHECK(h1.size() == 11);  // 5 observables x 2 t-values + curve
}

TEST_CASE("csv round trip is exact") {
    const std::string dir = fresh_dir("roundtrip");
    fs::create_directories(dir);
    CsvTable t;
    t.header = {"a", "b"};
    const std::vector<double> vals = {1.0 / 3.0, 1e-300, -0.0, 6.02214076e23,
                                      std::nan(""), 0.1 + 0.2};
    for (double v : vals) t.rows.push_back({format_double(v), format_double(-v)});
    const std::string path = dir + "/x.csv";
    emit_csv(t, path);
    const CsvTable back = read_csv(path);
    REQUIRE(back.rows.size() == vals.size());
    for (std::size_t k = 0; k < vals.size(); k++) {
        const double a = std::strtod(back.rows[k][0].c_str(), nullptr);
        if (std::isnan(vals[k]))
            CHECK(std::isnan(a));
        else
            CHECK(a == vals[k]);
    }
}

TEST_CASE("manifest hashes match recomputation") {
    const std::string dir = fresh_dir("manifest");
    RunConfig cfg;
    cfg.t_values = {2};
    cfg.replicas = 50;
    cfg.observables = {"columns", "exponents"};
    cfg.out_dir = dir;
    const RunManifest man = run_ensemble(cfg);
    for (const auto& f : man.files) {
        CHECK(fnv1a64_hex_of_file(dir + "/" + f.path) == f.fnv1a64);
        CHECK(fs::file_size(dir + "/" + f.path) == f.bytes);
    }
    // degenerate-sample accounting is part of the manifest
    CHECK(man.excluded.count("theta_degenerate_t2") == 1);
    CHECK(man.excluded.count("vartheta_degenerate_t2") == 1);
}

TEST_CASE("empty series emit a header-only csv") {
    const std::string dir = fresh_dir("empty");
    fs::create_directories(dir);
    CsvTable t;
    t.header = {"t", "neg_log_mean_lambda1"};
    emit_csv(t, dir + "/empty.csv");
    std::ifstream in(dir + "/empty.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,neg_log_mean_lambda1");
    CHECK(!std::getline(in, line));
}

TEST_CASE("unknown figure tags are rejected with the tag list") {
    RunConfig cfg = figure_base_config();
    cfg.out_dir = fresh_dir("badtag");
    try {
        reproduce_figure("fig9z", cfg);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("fig9z") != std::string::npos);
        CHECK(msg.find("fig1a") != std::string::npos);
        CHECK(msg.find("fig6d") != std::string::npos);
    }
}

TEST_CASE("invalid configs are usage errors") {
    RunConfig cfg;
    cfg.t_values = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.t_values = {3, 2};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.t_values = {1};
    cfg.observables = {"nonsense"};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.observables = {"columns"};
    cfg.replicas = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("replica streams show no index correlation") {
    const std::string dir = fresh_dir("lag");
    RunConfig cfg;
    cfg.n = 2;
    cfg.t_values = {1};
    cfg.replicas = 2000;
    cfg.master_seed = 2718;
    cfg.observables = {"columns"};
    cfg.out_dir = dir;
    run_ensemble(cfg);
    const CsvTable t = read_csv(dir + "/columns_t1.csv");
    std::vector<double> u11;
    for (const auto& row : t.rows) u11.push_back(std::strtod(row[1].c_str(), nullptr));
    const double mu = mean(u11);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k + 1 < u11.size(); k++) num += (u11[k] - mu) * (u11[k + 1] - mu);
    for (double x : u11) den += (x - mu) * (x - mu);
    CHECK(std::fabs(num / den) < 3.0 / std::sqrt(static_cast<double>(cfg.replicas)));
}

TEST_CASE("figure fig1a emits the histogram with the analytic overlay") {
    const std::string dir = fresh_dir("fig1a");
    RunConfig cfg = figure_base_config();
    cfg.replicas = 3000;
    cfg.master_seed = 31;
    cfg.out_dir = dir;
    cfg.emit_svg = true;
    const RunManifest man = reproduce_figure("fig1a", cfg);
    CHECK(man.files.size() == 2);  // csv + svg
    const CsvTable t = read_csv(dir + "/fig1a.csv");
    REQUIRE(t.header == std::vector<std::string>{"bin_left", "bin_right", "density",
                                                 "analytic_density"});
    REQUIRE(t.rows.size() == 50);
    double mass = 0.0;
    for (const auto& row : t.rows) {
        const double l = std::strtod(row[0].c_str(), nullptr);
        const double r = std::strtod(row[1].c_str(), nullptr);
        const double d = std::strtod(row[2].c_str(), nullptr);
        const double mid = 0.5 * (l + r);
        CHECK(std::strtod(row[3].c_str(), nullptr) ==
              doctest::Approx(two_step_density(mid)).epsilon(1e-12));
        mass += d * (r - l);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    // svg is self-contained markup
    std::ifstream svg(dir + "/fig1a.svg");
    std::string body((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
    CHECK(body.find("<svg") == 0);
    CHECK(body.find("</svg>") != std::string::npos);
    CHECK(body.find("<rect") != std::string::npos);
    CHECK(body.find("<polyline") != std::string::npos);
}

TEST_CASE("figure determinism under different worker counts") {
    RunConfig cfg = figure_base_config();
    cfg.replicas = 2000;
    cfg.master_seed = 77;
    const std::string d1 = fresh_dir("figdet1"), d2 = fresh_dir("figdet2");
    cfg.out_dir = d1;
    cfg.workers = 1;
    reproduce_figure("fig4a", cfg);
    cfg.out_dir = d2;
    cfg.workers = 2;
    reproduce_figure("fig4a", cfg);
    CHECK(fnv1a64_hex_of_file(d1 + "/fig4a.csv") == fnv1a64_hex_of_file(d2 + "/fig4a.csv"));
}

TEST_CASE("fixed point check reports residuals on the grid") {
    std::ostringstream out;
    const double worst = check_fixed_point(1.0, 9, 1e-5, out);
    CHECK(worst < 1e-7);
    CHECK(out.str().find("region_i=") != std::string::npos);
    CHECK(out.str().find("PASS") != std::string::npos);
    // a floor below the quadrature's reach must report failure, not pass
    std::ostringstream out2;
    const double worst2 = check_fixed_point(1.0, 3, 1e-16, out2);
    CHECK(worst2 > 1e-16);
    CHECK(out2.str().find("FAIL") != std::string::npos);
}

#ifdef RMC_CLI_PATH
TEST_CASE("cli exit codes follow the documented contract") {
    const std::string cli = RMC_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int rc = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(run("version") == 0);
    CHECK(run("figure fig9z --out /tmp/rmc_exit_test") == 2);  // unknown tag
    CHECK(run("ensemble --n 1 --out /tmp/rmc_exit_test") == 2);  // invalid config
    CHECK(run("nonsense") == 2);
    CHECK(run("check-fixed-point --a 1 --grid 3 --tol 1e-16") == 3);  // below quadrature floor
    CHECK(run("check-fixed-point --a 1 --grid 3 --tol 1e-5") == 0);
    CHECK(run("ensemble --replicas 1 --out /proc/nope/x") == 4);
}
#endif

TEST_CASE("unwritable output directory is an io failure") {
    RunConfig cfg;
    cfg.t_values = {1};
    cfg.replicas = 1;
    cfg.observables = {"columns"};
    cfg.out_dir = "/proc/definitely_not_writable/x";
    CHECK_THROWS_AS(run_ensemble(cfg), IoFailure);
}
