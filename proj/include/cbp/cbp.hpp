#pragma once

#include "cbp/basis.hpp"
#include "cbp/cases.hpp"
#include "cbp/config.hpp"
#include "cbp/constraints.hpp"
#include "cbp/discretization.hpp"
#include "cbp/driver.hpp"
#include "cbp/equations.hpp"
#include "cbp/errors.hpp"
#include "cbp/limiter.hpp"
#include "cbp/mesh.hpp"
#include "cbp/parallel.hpp"
#include "cbp/reference.hpp"
#include "cbp/solver.hpp"
#include "cbp/stabilize.hpp"
#include "cbp/verify.hpp"
