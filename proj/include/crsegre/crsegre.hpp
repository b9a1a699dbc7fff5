#pragma once

#include "crmap.hpp"
#include "chains.hpp"
#include "expr.hpp"
#include "gaussian_rational.hpp"
#include "manifold.hpp"
#include "multi_index.hpp"
#include "nondegen.hpp"
#include "rank.hpp"
#include "series.hpp"
#include "verdict.hpp"
