// fnls: everything in one include.
#pragma once

#include "fnls/config.hpp"
#include "fnls/error.hpp"
#include "fnls/experiment.hpp"
#include "fnls/field.hpp"
#include "fnls/grid.hpp"
#include "fnls/io.hpp"
#include "fnls/model.hpp"
#include "fnls/petviashvili.hpp"
#include "fnls/semiclassical.hpp"
#include "fnls/spectral.hpp"
#include "fnls/stability.hpp"
#include "fnls/timestepper.hpp"
