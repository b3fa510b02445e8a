#pragma once

#include "emg/config.hpp"
#include "emg/engine.hpp"
#include "emg/ensemble.hpp"
#include "emg/market.hpp"
#include "emg/meanfield.hpp"
#include "emg/observables.hpp"
#include "emg/params.hpp"
#include "emg/rng.hpp"
#include "emg/sweep.hpp"
