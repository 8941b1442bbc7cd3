#pragma once

#include "complex.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "hodge.hpp"
#include "io.hpp"
#include "metric.hpp"
#include "selection.hpp"
#include "semigroup.hpp"
#include "serialize.hpp"
