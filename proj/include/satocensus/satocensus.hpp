#pragma once

#include "arith.hpp"
#include "census.hpp"
#include "classno.hpp"
#include "discrete_dist.hpp"
#include "experiments.hpp"
#include "gekeler.hpp"
#include "histogram.hpp"
#include "metric.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "ydist.hpp"
