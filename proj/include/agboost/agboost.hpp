#pragma once

#include "agboost/boost_online.hpp"
#include "agboost/boost_stat.hpp"
#include "agboost/core.hpp"
#include "agboost/errors.hpp"
#include "agboost/games.hpp"
#include "agboost/harness.hpp"
#include "agboost/oco.hpp"
#include "agboost/rng.hpp"
#include "agboost/trace_io.hpp"
#include "agboost/verify.hpp"
#include "agboost/weaklearn.hpp"
