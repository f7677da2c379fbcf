#ifndef ETAMU_SCENARIO_HPP
#define ETAMU_SCENARIO_HPP

#include "etamu/monte_carlo.hpp"
#include "etamu/performance_metrics.hpp"
#include "etamu/sum_statistics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace etamu {

enum class SweepVariable { common_gbar_db, eta, p, mu, snr_db };
enum class Metric { pdf, cdf, outage, ser, capacity };

struct SweepAxis {
    SweepVariable variable = SweepVariable::common_gbar_db;
    std::vector<double> values;  // from start/stop/points or an explicit list
};

struct Scenario {
    std::string name;
    std::vector<BranchParams> branches;  // Format I after conversion
    std::vector<SweepAxis> sweep;        // row order: last axis varies fastest
    std::vector<Metric> metrics;
    double threshold = 1.0;  // outage threshold, linear
    double snr = 1.0;        // pdf/cdf evaluation point, linear
    ModulationScheme modulation = modulation_preset("BPSK");
    CapacityFit fit{};
    EvalRoute route = EvalRoute::automatic;
    EvalOptions eval{};
    bool simulate = false;
    SimConfig sim{};
    std::string output_directory = ".";
    std::string output_prefix;
};

struct Diagnostic {
    enum class Level { error, notice };
    Level level = Level::error;
    std::string field;  // JSON path, e.g. "branches[1].eta2"
    std::string message;
};

std::string to_string(const Diagnostic& d);

// Every problem in the document is reported; the scenario is returned only
// when there are no errors.
std::optional<Scenario> parse_scenario(const std::string& json_text, std::vector<Diagnostic>& diags);
std::optional<Scenario> load_scenario(const std::string& path, std::vector<Diagnostic>& diags);

std::vector<Diagnostic> validate_scenario(const std::string& path);

struct RunReport {
    int exit_code = 0;  // 0 ok, 1 validation failure, 2 cells marked NA
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> files;
    std::size_t na_cells = 0;
};

// Writes <directory>/<prefix>_<metric>.csv for every metric.
RunReport run_scenario(const Scenario& sc);
RunReport run_scenario(const std::string& path,
                       const std::optional<std::string>& output_directory = std::nullopt);

std::vector<std::string> preset_names();
// Scenario template as a JSON document.
std::string preset_json(const std::string& name);

}  // namespace etamu

#endif  // ETAMU_SCENARIO_HPP
