#pragma once

#include "vexmem/error.hpp"
#include "vexmem/quadrature.hpp"
#include "vexmem/special_functions.hpp"
#include "vexmem/ml_table.hpp"
#include "vexmem/time_grid.hpp"
#include "vexmem/exponent.hpp"
#include "vexmem/kernel.hpp"
#include "vexmem/convolution.hpp"
#include "vexmem/forcing.hpp"
#include "vexmem/mode_solver.hpp"
#include "vexmem/spectral.hpp"
#include "vexmem/field.hpp"
#include "vexmem/csv.hpp"
#include "vexmem/config.hpp"
#include "vexmem/harness.hpp"
