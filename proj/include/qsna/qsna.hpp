#pragma once

#include "qsna/rational.hpp"
#include "qsna/linalg.hpp"
#include "qsna/lp.hpp"
#include "qsna/geometry.hpp"
#include "qsna/market.hpp"
#include "qsna/no_arbitrage.hpp"
#include "qsna/priors.hpp"
#include "qsna/io.hpp"
#include "qsna/harness.hpp"
