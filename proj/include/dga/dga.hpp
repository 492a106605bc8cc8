#pragma once

// Umbrella header: dissolved-gas-analysis fault diagnosis via Rogers and IEC
// ratio coding, rule-table lookup and Levenberg-Marquardt-trained MLPs.

#include "dga/gas.hpp"
#include "dga/ratios.hpp"
#include "dga/rules.hpp"
#include "dga/mlp.hpp"
#include "dga/lm.hpp"
#include "dga/data.hpp"
#include "dga/pipeline.hpp"
#include "dga/render.hpp"
