// Train the IEC network on the built-in pattern table, persist it, and run
// it next to the rule table on the bundled corpus.

#include <filesystem>
#include <iostream>

#include "dga/dga.hpp"

int main() {
    const auto patterns = dga::iec_training_set();
    dga::TrainConfig config;  // mse goal 1e-3, up to 1000 epochs, seed 42

    auto net = dga::init_network(dga::RatioMethod::Iec,
                                 dga::default_layer_sizes(dga::RatioMethod::Iec),
                                 config.seed);
    auto [trained, report] = dga::train_lm(std::move(net), patterns, config);
    std::cout << "trained in " << report.epochs << " epochs, final mse "
              << report.final_mse << "\n\n";

    const dga::TrainedModel model{std::move(trained), config, report.final_mse};
    const auto path = std::filesystem::temp_directory_path() / "demo-ann-iec.json";
    dga::save_model(model, path);
    const auto reloaded = dga::load_model(path);

    dga::Models models;
    models.iec = &reloaded;
    const dga::MethodSet methods{false, true, false, true};
    for (const auto& sample : dga::builtin_corpus().samples) {
        const auto r = dga::diagnose(sample, methods, {}, models);
        std::cout << "sample " << r.id << ": table says " << to_string(r.diagnoses[0].coarse)
                  << ", network says " << to_string(r.diagnoses[1].coarse) << " ("
                  << fine_description(r.diagnoses[1]) << ")\n";
    }
    return 0;
}
