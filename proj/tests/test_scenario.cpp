#include "doctest.h"

#include "etamu/errors.hpp"
#include "etamu/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace etamu;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) row.push_back(c);
        rows.push_back(row);
    }
    return rows;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("etamu_test_" + name);
    fs::remove_all(d);
    return d;
}

bool mentions(const std::vector<Diagnostic>& diags, const std::string& field, Diagnostic::Level level) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
        return d.field == field && d.level == level;
    });
}

const char* kSmall = R"({
  "name": "small",
  "branches": [
    {"format": "I", "mu": 1.25, "eta": 0.5, "p": 0.3, "gbar_db": 3},
    {"format": "II", "mu": 0.75, "eta2": 0.2, "p2": -0.4, "gbar": 1.5}
  ],
  "sweep": [
    {"variable": "eta", "values": [0.3, 0.9]},
    {"variable": "common-gbar-dB", "start": 0, "stop": 10, "points": 3}
  ],
  "metrics": ["pdf", "outage", "ser", "capacity"],
  "options": {"threshold_db": 2, "snr": 1.5, "modulation": "QPSK"},
  "sim": {"enabled": true, "seed": 5, "replicas": 2000},
  "output": {"prefix": "s"}
})";

}  // namespace

TEST_CASE("branch formats and units") {
    std::vector<Diagnostic> diags;
    const auto sc = parse_scenario(kSmall, diags);
    REQUIRE(sc);
    CHECK(diags.empty());
    REQUIRE(sc->branches.size() == 2);
    CHECK(sc->branches[0].gbar() == doctest::Approx(std::pow(10.0, 0.3)));
    const BranchParams f1 = format2_to_format1(FormatIIParams(0.75, 0.2, -0.4, 1.5));
    CHECK(sc->branches[1].eta() == doctest::Approx(f1.eta()).epsilon(1e-15));
    CHECK(sc->branches[1].p() == doctest::Approx(f1.p()).epsilon(1e-15));
    CHECK(sc->threshold == doctest::Approx(std::pow(10.0, 0.2)));
    CHECK(sc->snr == 1.5);
    CHECK(sc->modulation.name == modulation_preset("QPSK").name);
    CHECK(sc->sim.seed == 5);
    CHECK(sc->simulate);
    REQUIRE(sc->sweep.size() == 2);
    CHECK(sc->sweep[1].values == std::vector<double>{0.0, 5.0, 10.0});
}

TEST_CASE("copies replicate a branch") {
    std::vector<Diagnostic> diags;
    const auto sc = parse_scenario(R"({"branches":[{"format":"I","mu":1,"eta":0.25,"p":0.25,"gbar":2,"copies":3}],
        "sweep":[{"variable":"snr-dB","start":-5,"stop":5,"points":2}],"metrics":["cdf"]})",
                                   diags);
    REQUIRE(sc);
    CHECK(sc->branches.size() == 3);
    CHECK(sc->name == "scenario");
    CHECK(sc->output_prefix == "scenario");
    CHECK_FALSE(sc->simulate);
}

TEST_CASE("every problem is reported") {
    std::vector<Diagnostic> diags;
    const auto sc = parse_scenario(R"({
      "branches": [
        {"format": "II", "mu": -1, "eta2": 2, "p2": 0.1, "gbar": 1, "extra": 0},
        {"format": "III", "mu": 1, "gbar": 1},
        {"mu": 1, "eta": 1, "p": 1, "gbar": 1, "gbar_db": 0}
      ],
      "sweep": [{"variable": "speed", "start": 0, "stop": 1, "points": 1},
                {"variable": "mu", "values": [1, -2]}],
      "metrics": ["outage", "ber"],
      "options": {"modulation": "17-QAM", "route": "fast"},
      "sim": {"replicas": 0},
      "colour": "red"
    })",
                                   diags);
    CHECK_FALSE(sc);
    const auto E = Diagnostic::Level::error;
    CHECK(mentions(diags, "colour", E));
    CHECK(mentions(diags, "branches[0].mu", E));
    CHECK(mentions(diags, "branches[0].eta2", E));
    CHECK(mentions(diags, "branches[0].extra", E));
    CHECK(mentions(diags, "branches[1].format", E));
    CHECK(mentions(diags, "branches[2].format", Diagnostic::Level::notice));
    CHECK(mentions(diags, "branches[2].gbar", E));
    CHECK(mentions(diags, "sweep[0].variable", E));
    CHECK(mentions(diags, "sweep[0].points", E));
    CHECK(mentions(diags, "sweep[1]", E));
    CHECK(mentions(diags, "metrics[1]", E));
    CHECK(mentions(diags, "options.modulation", E));
    CHECK(mentions(diags, "options.route", E));
    CHECK(mentions(diags, "sim.replicas", E));
    CHECK(mentions(diags, "sim.seed", Diagnostic::Level::notice));
    for (const auto& d : diags) CHECK_FALSE(to_string(d).empty());

    diags.clear();
    CHECK_FALSE(parse_scenario("{not json", diags));
    CHECK(diags.size() == 1);
    diags.clear();
    CHECK_FALSE(parse_scenario(R"({"branches":[{"format":"I","mu":1,"eta":1,"p":1,"gbar":1}],
        "sweep":[{"variable":"eta","values":[1,2]}],"metrics":[]})",
                               diags));
    CHECK(mentions(diags, "metrics", E));
}

TEST_CASE("run writes one table per metric") {
    std::vector<Diagnostic> diags;
    auto sc = parse_scenario(kSmall, diags);
    REQUIRE(sc);
    const fs::path dir = scratch_dir("run");
    sc->output_directory = dir.string();
    const RunReport rep = run_scenario(*sc);
    CHECK(rep.exit_code == 0);
    CHECK(rep.na_cells == 0);
    REQUIRE(rep.files.size() == 4);

    const std::string raw = slurp((dir / "s_outage.csv").string());
    CHECK(raw.find('\r') == std::string::npos);
    CHECK(raw.back() == '\n');

    const auto outage_rows = read_csv((dir / "s_outage.csv").string());
    REQUIRE(outage_rows.size() == 7);
    CHECK(outage_rows[0] == std::vector<std::string>{"eta", "common_gbar_db", "analytic", "asymptotic",
                                                     "mc", "mc_half_width"});
    // last axis fastest
    CHECK(outage_rows[1][0] == "0.3");
    CHECK(outage_rows[2][0] == "0.3");
    CHECK(outage_rows[2][1] == "5");
    CHECK(outage_rows[4][0] == "0.9");
    for (std::size_t r = 1; r < outage_rows.size(); ++r) {
        const double eta = std::stod(outage_rows[r][0]);
        const double g = std::pow(10.0, std::stod(outage_rows[r][1]) / 10.0);
        std::vector<BranchParams> b;
        for (const auto& x : sc->branches) b.emplace_back(x.mu(), eta, x.p(), g);
        const MrcChannel ch(b);
        const double expect = outage(ch, sc->threshold);
        CHECK(std::stod(outage_rows[r][2]) == doctest::Approx(expect).epsilon(1e-11));
        const double mc = std::stod(outage_rows[r][4]), hw = std::stod(outage_rows[r][5]);
        CHECK(std::abs(mc - expect) < 4.0 * hw);
    }

    const auto pdf_rows = read_csv((dir / "s_pdf.csv").string());
    CHECK(pdf_rows[0].size() == 3);
    const auto cap_rows = read_csv((dir / "s_capacity.csv").string());
    CHECK(cap_rows[0] == std::vector<std::string>{"eta", "common_gbar_db", "analytic",
                                                  "exact_log_numint", "eps_fit", "mc", "mc_half_width"});
    CHECK(std::stod(cap_rows[1][4]) == doctest::Approx(fit_error_bound(CapacityFit{})));
    const auto ser_rows = read_csv((dir / "s_ser.csv").string());
    CHECK(ser_rows.size() == 7);
    fs::remove_all(dir);
}

TEST_CASE("output is byte-identical across runs and worker counts") {
    std::vector<Diagnostic> diags;
    auto sc = parse_scenario(kSmall, diags);
    REQUIRE(sc);
    const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
    sc->output_directory = a.string();
    sc->sim.stream_count = 1;
    REQUIRE(run_scenario(*sc).exit_code == 0);
    sc->output_directory = b.string();
    sc->sim.stream_count = 3;
    REQUIRE(run_scenario(*sc).exit_code == 0);
    for (const char* f : {"s_pdf.csv", "s_outage.csv", "s_ser.csv", "s_capacity.csv"})
        CHECK(slurp((a / f).string()) == slurp((b / f).string()));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("snr axis moves the threshold") {
    std::vector<Diagnostic> diags;
    auto sc = parse_scenario(R"({"name":"snr","branches":[{"format":"I","mu":2,"eta":0.7,"p":0.7,"gbar":1}],
        "sweep":[{"variable":"snr-dB","values":[-3,0,3]}],"metrics":["cdf","outage"]})",
                             diags);
    REQUIRE(sc);
    const fs::path dir = scratch_dir("snr");
    sc->output_directory = dir.string();
    REQUIRE(run_scenario(*sc).exit_code == 0);
    const auto cdf = read_csv((dir / "snr_cdf.csv").string());
    const auto out = read_csv((dir / "snr_outage.csv").string());
    const MrcChannel ch({BranchParams(2, 0.7, 0.7, 1)});
    for (std::size_t r = 1; r <= 3; ++r) {
        CHECK(cdf[r][1] == out[r][1]);
        const double x = std::pow(10.0, std::stod(cdf[r][0]) / 10.0);
        CHECK(std::stod(cdf[r][1]) == doctest::Approx(sum_cdf(ch, x)).epsilon(1e-11));
    }
    fs::remove_all(dir);
}

TEST_CASE("failed cells are marked and the run exits with 2") {
    std::vector<Diagnostic> diags;
    auto sc = parse_scenario(R"({"name":"na","branches":[{"format":"I","mu":40,"eta":0.5,"p":0.5,"gbar":1}],
        "sweep":[{"variable":"snr-dB","values":[-1,0]}],"metrics":["pdf"],
        "options":{"route":"bromwich"},
        "controls":{"contour_nodes":8,"contour_max_nodes":8,"contour_tolerance":1e-15}})",
                             diags);
    REQUIRE(sc);
    const fs::path dir = scratch_dir("na");
    sc->output_directory = dir.string();
    const RunReport rep = run_scenario(*sc);
    CHECK(rep.exit_code == 2);
    CHECK(rep.na_cells == 2);
    CHECK_FALSE(rep.diagnostics.empty());
    const auto rows = read_csv((dir / "na_pdf.csv").string());
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][1].rfind("NA(", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("invalid files write nothing") {
    const fs::path dir = scratch_dir("invalid");
    fs::create_directories(dir);
    const auto path = (dir / "bad.json").string();
    std::ofstream(path) << R"({"branches":[],"sweep":[],"metrics":["pdf"],"output":{"directory":")"
                        << (dir / "out").string() << R"("}})";
    const RunReport rep = run_scenario(path);
    CHECK(rep.exit_code == 1);
    CHECK(rep.files.empty());
    CHECK_FALSE(fs::exists(dir / "out"));
    CHECK_FALSE(validate_scenario(path).empty());
    CHECK(run_scenario((dir / "missing.json").string()).exit_code == 1);
    fs::remove_all(dir);
}

TEST_CASE("presets are valid scenarios") {
    CHECK(preset_names() == std::vector<std::string>{"fig1", "fig2", "fig3", "capacity"});
    for (const auto& name : preset_names()) {
        std::vector<Diagnostic> diags;
        const auto sc = parse_scenario(preset_json(name), diags);
        REQUIRE(sc);
        CHECK(diags.empty());
        CHECK(sc->output_prefix == name);
    }
    std::vector<Diagnostic> diags;
    const auto fig2 = parse_scenario(preset_json("fig2"), diags);
    REQUIRE(fig2->sweep.size() == 3);
    CHECK(fig2->sweep[1].values.size() == 41);
    CHECK(fig2->sweep[2].values.size() == 41);
    CHECK(fig2->branches.size() == 2);
    const auto fig1 = parse_scenario(preset_json("fig1"), diags);
    CHECK(fig1->branches.size() == 4);
    CHECK(fig1->branches[2].mu() == 1.75);
    CHECK_THROWS_AS(preset_json("fig9"), DomainError);
}
