#pragma once

#include "vox3d/connloss.hpp"
#include "vox3d/dataset.hpp"
#include "vox3d/dataset_io.hpp"
#include "vox3d/distance.hpp"
#include "vox3d/errors.hpp"
#include "vox3d/evaluate.hpp"
#include "vox3d/grid.hpp"
#include "vox3d/hull.hpp"
#include "vox3d/json_io.hpp"
#include "vox3d/labeling.hpp"
#include "vox3d/metrics.hpp"
#include "vox3d/random.hpp"
#include "vox3d/rasterize.hpp"
#include "vox3d/rotation.hpp"
#include "vox3d/shapegen.hpp"
