#pragma once

// Umbrella header.

#include "epr/budget.hpp"
#include "epr/cavity.hpp"
#include "epr/config.hpp"
#include "epr/detection.hpp"
#include "epr/errors.hpp"
#include "epr/gaussian.hpp"
#include "epr/mode_cleaner.hpp"
#include "epr/trace.hpp"
