#pragma once

#include "gridgrow/avoidance.hpp"
#include "gridgrow/bigint.hpp"
#include "gridgrow/cell_matrix.hpp"
#include "gridgrow/counting.hpp"
#include "gridgrow/errors.hpp"
#include "gridgrow/grid.hpp"
#include "gridgrow/gridding.hpp"
#include "gridgrow/permutation.hpp"
#include "gridgrow/spectral.hpp"
#include "gridgrow/variational.hpp"
