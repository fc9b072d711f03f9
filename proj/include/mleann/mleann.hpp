#ifndef MLEANN_MLEANN_HPP
#define MLEANN_MLEANN_HPP

#include "mleann/bench/emit.hpp"
#include "mleann/bench/experiment.hpp"
#include "mleann/data/registry.hpp"
#include "mleann/evolve/evolution.hpp"
#include "mleann/evolve/genome.hpp"
#include "mleann/net.hpp"
#include "mleann/trainers.hpp"

#endif  // MLEANN_MLEANN_HPP
