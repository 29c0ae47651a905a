#pragma once

#include "lcx/core.hpp"
#include "lcx/grid.hpp"
#include "lcx/sampled_function.hpp"
#include "lcx/gallery.hpp"
#include "lcx/lsc_probe.hpp"
#include "lcx/minorant.hpp"
#include "lcx/envelopes.hpp"
#include "lcx/family.hpp"
#include "lcx/lp.hpp"
#include "lcx/maximal.hpp"
#include "lcx/subdiff.hpp"
#include "lcx/ekeland.hpp"
#include "lcx/extremum.hpp"
