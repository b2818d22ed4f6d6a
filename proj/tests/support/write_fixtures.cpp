// Regenerates the model files under models/ from the fixture builders.
// Usage: write_fixtures <models-dir>

#include "fixtures.hpp"

#include "trendsim/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace trendsim;

namespace {

void emit(const fs::path& dir, const std::string& stem, Model model, bool toggles) {
    if (toggles) {
        std::ofstream(dir / (stem + "_toggles.csv"), std::ios::binary) << write_toggles_csv(model);
    }
    for (auto& e : model.elements) {
        e.toggles.clear();
    }
    std::ofstream(dir / (stem + ".model"), std::ios::binary) << serialize_model(model);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: write_fixtures <models-dir>\n";
        return 1;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir / "toy");
    emit(dir, "trio", fixtures::trio_model(), true);
    emit(dir, "random31", fixtures::benchmark_model(), true);
    for (auto scenario : {fixtures::ToyScenario::regular, fixtures::ToyScenario::or_, fixtures::ToyScenario::and_,
                          fixtures::ToyScenario::not_, fixtures::ToyScenario::target}) {
        for (auto mode : {Mode::level, Mode::trend, Mode::hybrid}) {
            const auto stem = std::string(fixtures::scenario_name(scenario)) + "_" + std::string(to_string(mode));
            emit(dir / "toy", stem, fixtures::toy_model(scenario, mode), false);
        }
    }
    std::ofstream(dir / "toy" / "toggles.csv", std::ios::binary)
        << write_toggles_csv(fixtures::toy_model(fixtures::ToyScenario::regular, Mode::level));
    return 0;
}
