#ifndef NZSG_NZSG_HPP
#define NZSG_NZSG_HPP

#include "nzsg/vecmat.hpp"
#include "nzsg/sets.hpp"
#include "nzsg/game.hpp"
#include "nzsg/instances.hpp"
#include "nzsg/saddle.hpp"
#include "nzsg/icl.hpp"
#include "nzsg/diagnostics.hpp"
#include "nzsg/io.hpp"
#include "nzsg/bench.hpp"

#endif
