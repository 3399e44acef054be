#pragma once

// Umbrella header for the forward-collision warning toolkit.

#include "fcw/dataset.hpp"
#include "fcw/eval.hpp"
#include "fcw/models.hpp"
#include "fcw/preprocess.hpp"
#include "fcw/scenario.hpp"
#include "fcw/scenario_file.hpp"
#include "fcw/synth.hpp"
