#pragma once

#include "omegalab/codec.hpp"
#include "omegalab/diag.hpp"
#include "omegalab/errors.hpp"
#include "omegalab/extender.hpp"
#include "omegalab/finset.hpp"
#include "omegalab/generic.hpp"
#include "omegalab/json_io.hpp"
#include "omegalab/parallel.hpp"
#include "omegalab/permutation.hpp"
#include "omegalab/pipeline.hpp"
#include "omegalab/rng.hpp"
