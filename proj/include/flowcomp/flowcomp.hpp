#pragma once

#include "flowcomp/errors.hpp"
#include "flowcomp/expr.hpp"
#include "flowcomp/geometry.hpp"
#include "flowcomp/integrator.hpp"
#include "flowcomp/completion.hpp"
#include "flowcomp/separability.hpp"
#include "flowcomp/scenarios.hpp"
