#pragma once

// Umbrella header.

#include "mpfc/error.hpp"
#include "mpfc/grid.hpp"
#include "mpfc/field.hpp"
#include "mpfc/spectral.hpp"
#include "mpfc/params.hpp"
#include "mpfc/state.hpp"
#include "mpfc/model.hpp"
#include "mpfc/integrators.hpp"
#include "mpfc/oracle.hpp"
#include "mpfc/energy_identity.hpp"
#include "mpfc/fit.hpp"
#include "mpfc/decomposition.hpp"
#include "mpfc/parallel.hpp"
#include "mpfc/experiments.hpp"
#include "mpfc/config.hpp"
#include "mpfc/io.hpp"
#include "mpfc/runner.hpp"
