#pragma once

#include "schottky/errors.hpp"
#include "schottky/exact.hpp"
#include "schottky/kp.hpp"
#include "schottky/period_matrix.hpp"
#include "schottky/relation.hpp"
#include "schottky/theta.hpp"
