#pragma once

#include "sdgf/config.hpp"
#include "sdgf/error.hpp"
#include "sdgf/experiments.hpp"
#include "sdgf/frame.hpp"
#include "sdgf/gabor.hpp"
#include "sdgf/signals.hpp"
#include "sdgf/solvers.hpp"
#include "sdgf/types.hpp"
#include "sdgf/zauner.hpp"
