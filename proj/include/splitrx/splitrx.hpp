#pragma once

#include "splitrx/channel.hpp"
#include "splitrx/experiment.hpp"
#include "splitrx/mi.hpp"
#include "splitrx/modem.hpp"
#include "splitrx/optimize.hpp"
#include "splitrx/parallel.hpp"
#include "splitrx/quadrature.hpp"
#include "splitrx/rng.hpp"
#include "splitrx/special.hpp"
