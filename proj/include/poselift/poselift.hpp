#pragma once

#include "poselift/basis.hpp"
#include "poselift/camera.hpp"
#include "poselift/common.hpp"
#include "poselift/eval.hpp"
#include "poselift/io.hpp"
#include "poselift/lifter.hpp"
#include "poselift/pipeline.hpp"
#include "poselift/skeleton.hpp"
