#pragma once

#include "godm/error.hpp"
#include "godm/numerics/adam.hpp"
#include "godm/numerics/rng.hpp"
#include "godm/numerics/tensor.hpp"
#include "godm/graph/batch.hpp"
#include "godm/graph/benchmark.hpp"
#include "godm/graph/graph.hpp"
#include "godm/graph/io.hpp"
#include "godm/graph/partition.hpp"
#include "godm/graph/sampling.hpp"
#include "godm/model/diffusion.hpp"
#include "godm/model/encoder.hpp"
#include "godm/model/generator.hpp"
#include "godm/pipeline/augment.hpp"
#include "godm/pipeline/checkpoint.hpp"
#include "godm/pipeline/config.hpp"
#include "godm/pipeline/config_io.hpp"
#include "godm/pipeline/losses.hpp"
#include "godm/pipeline/train.hpp"
#include "godm/eval/detector.hpp"
#include "godm/eval/histogram.hpp"
#include "godm/eval/metrics.hpp"
#include "godm/eval/runner.hpp"
#include "godm/cli/run_config.hpp"
#include "godm/cli/commands.hpp"
