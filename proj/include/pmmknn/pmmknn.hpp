#pragma once

#include "pmmknn/aggregation.hpp"
#include "pmmknn/classifier.hpp"
#include "pmmknn/commands.hpp"
#include "pmmknn/core.hpp"
#include "pmmknn/dataio.hpp"
#include "pmmknn/error.hpp"
#include "pmmknn/evaluation.hpp"
#include "pmmknn/random.hpp"
