#pragma once

// Interval-map models: the exact dyadic doubling map and Ulam discretizations.

#include "pfkit/dyadic.hpp"
#include "pfkit/ulam.hpp"
