#pragma once

#include "tikhochaos/analysis.hpp"
#include "tikhochaos/chaoscan.hpp"
#include "tikhochaos/integrate.hpp"
#include "tikhochaos/io.hpp"
#include "tikhochaos/model.hpp"
#include "tikhochaos/parallel.hpp"
