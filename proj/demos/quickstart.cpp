// Diagnose one oil sample with both ratio tables and print the verdicts.

#include <iostream>

#include "dga/dga.hpp"

int main() {
    dga::GasSample sample;
    sample.id = "demo";
    sample.h2 = {127, false};
    sample.ch4 = {76, false};
    sample.co = {879, false};
    sample.co2 = {3471, false};
    sample.c2h4 = {23, false};
    sample.c2h6 = {32, false};
    sample.c2h2 = {49, false};

    const auto report = dga::diagnose(sample, {true, true, false, false});
    dga::render_text(std::span<const dga::DiagnosisReport>(&report, 1), std::cout);
    return 0;
}
