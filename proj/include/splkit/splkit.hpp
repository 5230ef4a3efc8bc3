#pragma once

// Umbrella header.

#include "splkit/augment.hpp"
#include "splkit/datagen.hpp"
#include "splkit/dataset_io.hpp"
#include "splkit/error.hpp"
#include "splkit/eval.hpp"
#include "splkit/frame.hpp"
#include "splkit/geometry.hpp"
#include "splkit/loss.hpp"
#include "splkit/losscheck.hpp"
#include "splkit/parallel.hpp"
#include "splkit/reports.hpp"
#include "splkit/rng.hpp"
#include "splkit/spl.hpp"
