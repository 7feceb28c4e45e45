#pragma once

#include "frechet/baseline.hpp"
#include "frechet/descent.hpp"
#include "frechet/eig.hpp"
#include "frechet/engine.hpp"
#include "frechet/fast_trace.hpp"
#include "frechet/fid.hpp"
#include "frechet/gradient.hpp"
#include "frechet/io.hpp"
#include "frechet/matrix.hpp"
#include "frechet/rng.hpp"
#include "frechet/stats.hpp"
