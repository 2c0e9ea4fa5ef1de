#ifndef COREPRUNE_COREPRUNE_HPP
#define COREPRUNE_COREPRUNE_HPP

#include "activation.hpp"
#include "baselines.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "idx.hpp"
#include "io.hpp"
#include "lowerbound.hpp"
#include "model_io.hpp"
#include "network.hpp"
#include "pruning.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "scheme.hpp"
#include "train.hpp"
#include "weighted_set.hpp"

#endif  // COREPRUNE_COREPRUNE_HPP
