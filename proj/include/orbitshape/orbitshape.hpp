#pragma once

#include "orbitshape/equivalence.hpp"
#include "orbitshape/errors.hpp"
#include "orbitshape/geometry.hpp"
#include "orbitshape/image.hpp"
#include "orbitshape/invariants.hpp"
#include "orbitshape/linalg.hpp"
#include "orbitshape/oracle.hpp"
#include "orbitshape/random.hpp"
