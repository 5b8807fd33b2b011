#pragma once

#include "deepens/activation.hpp"
#include "deepens/core.hpp"
#include "deepens/dataset_io.hpp"
#include "deepens/deep_tree.hpp"
#include "deepens/ensemble.hpp"
#include "deepens/error.hpp"
#include "deepens/experiment.hpp"
#include "deepens/learners.hpp"
#include "deepens/multilinear.hpp"
#include "deepens/random.hpp"
#include "deepens/rational.hpp"
#include "deepens/report.hpp"
#include "deepens/shallow.hpp"
