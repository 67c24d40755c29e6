#pragma once

#include "qsir/analysis.hpp"
#include "qsir/continuum.hpp"
#include "qsir/core.hpp"
#include "qsir/errors.hpp"
#include "qsir/exact.hpp"
#include "qsir/recurrence.hpp"
