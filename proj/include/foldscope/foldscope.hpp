#pragma once

#include "foldscope/activation.hpp"
#include "foldscope/config.hpp"
#include "foldscope/dataset.hpp"
#include "foldscope/error.hpp"
#include "foldscope/experiments.hpp"
#include "foldscope/folding.hpp"
#include "foldscope/global.hpp"
#include "foldscope/mlp.hpp"
#include "foldscope/model_io.hpp"
#include "foldscope/path.hpp"
#include "foldscope/pattern.hpp"
#include "foldscope/rational.hpp"
#include "foldscope/rng.hpp"
#include "foldscope/stats.hpp"
#include "foldscope/trainer.hpp"
