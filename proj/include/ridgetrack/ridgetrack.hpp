#pragma once

// Umbrella header: the full ridge-trajectory toolkit.

#include "ridgetrack/curve.hpp"
#include "ridgetrack/eigen3.hpp"
#include "ridgetrack/errors.hpp"
#include "ridgetrack/evaluate.hpp"
#include "ridgetrack/features.hpp"
#include "ridgetrack/linalg3.hpp"
#include "ridgetrack/linking.hpp"
#include "ridgetrack/parallel.hpp"
#include "ridgetrack/pipeline.hpp"
#include "ridgetrack/scale_space.hpp"
#include "ridgetrack/scoring.hpp"
#include "ridgetrack/simulate.hpp"
#include "ridgetrack/tensor_io.hpp"
#include "ridgetrack/trajectory.hpp"
#include "ridgetrack/video_tensor.hpp"
