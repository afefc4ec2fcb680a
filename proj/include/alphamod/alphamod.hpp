#pragma once

#include "core.hpp"
#include "indices.hpp"
#include "covering.hpp"
#include "grid.hpp"
#include "fft.hpp"
#include "band.hpp"
#include "bapu.hpp"
#include "signal.hpp"
#include "test_signals.hpp"
#include "brushlet.hpp"
#include "io.hpp"
#include "experiments.hpp"
