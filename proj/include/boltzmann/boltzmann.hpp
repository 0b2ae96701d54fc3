#pragma once

#include "bases.hpp"
#include "collision.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "kernel.hpp"
#include "oracle.hpp"
#include "specfun.hpp"
#include "version.hpp"
