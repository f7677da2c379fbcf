#include "etamu/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void print(const std::vector<etamu::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << etamu::to_string(d) << '\n';
}

bool has_errors(const std::vector<etamu::Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.level == etamu::Diagnostic::Level::error) return true;
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outage, error rate and capacity of MRC over extended eta-mu fading"};
    app.require_subcommand(1);

    std::string run_file;
    std::optional<std::string> out_dir;
    auto* run = app.add_subcommand("run", "Evaluate a scenario and write one CSV per metric");
    run->add_option("scenario", run_file, "Scenario JSON file")->required();
    run->add_option("--out-dir", out_dir, "Override output.directory");

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Check a scenario file without evaluating it");
    validate->add_option("scenario", validate_file, "Scenario JSON file")->required();

    std::string preset;
    auto* presets = app.add_subcommand("presets", "List presets, or print one as JSON");
    presets->add_option("name", preset, "Preset name");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto rep = etamu::run_scenario(run_file, out_dir);
            print(rep.diagnostics);
            for (const auto& f : rep.files) std::cout << f << '\n';
            if (rep.na_cells) std::cerr << rep.na_cells << " cell(s) marked NA\n";
            return rep.exit_code;
        }
        if (*validate) {
            const auto diags = etamu::validate_scenario(validate_file);
            print(diags);
            if (has_errors(diags)) return 1;
            std::cout << validate_file << ": ok\n";
            return 0;
        }
        if (preset.empty()) {
            for (const auto& n : etamu::preset_names()) std::cout << n << '\n';
        } else {
            std::cout << etamu::preset_json(preset);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
