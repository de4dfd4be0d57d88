#pragma once

#include "zksem/carleman/estimates.hpp"
#include "zksem/carleman/interpolation.hpp"
#include "zksem/carleman/persistence.hpp"
#include "zksem/carleman/weighted_bounds.hpp"
