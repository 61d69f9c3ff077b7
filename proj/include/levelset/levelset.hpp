#pragma once

// Umbrella header for the library (the command-line front end is levelset/cli.hpp).

#include "levelset/error.hpp"
#include "levelset/jet.hpp"
#include "levelset/quadrature.hpp"
#include "levelset/fields.hpp"
#include "levelset/geometry.hpp"
#include "levelset/oracle.hpp"
#include "levelset/pharmonic.hpp"
#include "levelset/electrostatics.hpp"
#include "levelset/ehaction.hpp"
#include "levelset/report.hpp"
