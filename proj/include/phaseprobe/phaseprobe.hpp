#pragma once

#include "phaseprobe/addone.hpp"
#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/optimize.hpp"
#include "phaseprobe/population.hpp"
#include "phaseprobe/probes.hpp"
#include "phaseprobe/report.hpp"
#include "phaseprobe/rng.hpp"
#include "phaseprobe/spectral.hpp"
#include "phaseprobe/stats.hpp"
#include "phaseprobe/sweep.hpp"
