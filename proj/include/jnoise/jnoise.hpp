#pragma once

// Umbrella header for the JPEG noise-analysis library.

#include "jnoise/benchmark.hpp"
#include "jnoise/codec.hpp"
#include "jnoise/config.hpp"
#include "jnoise/core.hpp"
#include "jnoise/csv.hpp"
#include "jnoise/dct.hpp"
#include "jnoise/distributions.hpp"
#include "jnoise/jpeg_markers.hpp"
#include "jnoise/pgm.hpp"
#include "jnoise/plane_io.hpp"
#include "jnoise/qstep.hpp"
#include "jnoise/quant.hpp"
#include "jnoise/recompress.hpp"
#include "jnoise/stats.hpp"
#include "jnoise/synth.hpp"
#include "jnoise/trace_io.hpp"
#include "jnoise/validation.hpp"
