#pragma once

#include "absbm/baselines.hpp"
#include "absbm/bp.hpp"
#include "absbm/em.hpp"
#include "absbm/experiment.hpp"
#include "absbm/generators.hpp"
#include "absbm/graph.hpp"
#include "absbm/kmeans.hpp"
#include "absbm/metrics.hpp"
#include "absbm/model.hpp"
