#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rmc {

struct RunConfig {
    int n = 2;
    double a = 1.0;
    std::vector<int> t_values = {1};
    std::uint64_t replicas = 10000;
    std::uint64_t master_seed = 1;
    std::set<std::string> observables = {"columns"};
    int bins = 0;              // 0: automatic binning
    double eps_real = 0.01;
    std::string out_dir = ".";
    bool emit_svg = false;
    bool renormalize_columns = false;
    int workers = 0;           // 0: hardware concurrency

    void validate() const;  // throws std::invalid_argument
};

struct ManifestFile {
    std::string path;    // relative to out_dir
    std::string fnv1a64; // hex content hash
    std::uint64_t bytes = 0;
};

struct RunManifest {
    RunConfig config;
    std::string version;
    std::vector<ManifestFile> files;
    std::map<std::string, std::uint64_t> excluded;
    std::map<std::string, double> metrics;  // fit parameters etc. of figure runs
    double wall_seconds = 0.0;
};

// Simulates `replicas` independent chains, records the requested observables
// at every t in t_values, writes one CSV per observable per t plus a JSON
// manifest. Output bytes are a pure function of the config (any worker
// count).
RunManifest run_ensemble(const RunConfig& config);

// Known figure tags (fig1a ... fig6d).
const std::vector<std::string>& figure_tags();

// Reproduces one figure's data series. `base` supplies seed, output
// directory, svg flag, worker count, and bins; the figure's pinned
// parameters apply wherever base carries the sentinel values replicas=0,
// n=0, a=0, t_values empty, and are overridden otherwise.
RunManifest reproduce_figure(const std::string& tag, const RunConfig& base);

// A RunConfig whose tunable fields are all sentinels, for reproduce_figure.
RunConfig figure_base_config();

// Evaluates the stationary fixed-point split on the interior grid
// z = i/(grid+1) and prints one line per z. Returns the max residual.
double check_fixed_point(double a, int grid, double tol, std::ostream& out);

// CSV with a header row; all cells preformatted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
void emit_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);
void emit_manifest(const RunManifest& manifest, const std::string& path);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex_of_file(const std::string& path);

std::string format_double(double v);  // round-trip exact, locale independent

}  // namespace rmc
