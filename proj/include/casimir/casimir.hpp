#pragma once

#include "casimir/constants.hpp"
#include "casimir/corrections.hpp"
#include "casimir/domain.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/parallel.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/sweep.hpp"
