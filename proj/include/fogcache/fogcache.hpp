#ifndef FOGCACHE_FOGCACHE_HPP
#define FOGCACHE_FOGCACHE_HPP

#include "fogcache/admm.hpp"
#include "fogcache/baselines.hpp"
#include "fogcache/experiments.hpp"
#include "fogcache/heuristic.hpp"
#include "fogcache/io.hpp"
#include "fogcache/model.hpp"
#include "fogcache/objective.hpp"
#include "fogcache/projection.hpp"
#include "fogcache/queuesim.hpp"

#endif  // FOGCACHE_FOGCACHE_HPP
