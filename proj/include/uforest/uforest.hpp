#pragma once

// Umbrella header.

#include "uforest/baselines.hpp"
#include "uforest/dataset.hpp"
#include "uforest/entropy.hpp"
#include "uforest/error.hpp"
#include "uforest/experiments.hpp"
#include "uforest/forest.hpp"
#include "uforest/format.hpp"
#include "uforest/inference.hpp"
#include "uforest/io.hpp"
#include "uforest/isotonic.hpp"
#include "uforest/knn.hpp"
#include "uforest/parallel.hpp"
#include "uforest/quadrature.hpp"
#include "uforest/rng.hpp"
#include "uforest/serialize.hpp"
#include "uforest/sim.hpp"
#include "uforest/svg.hpp"
#include "uforest/tree.hpp"
