#pragma once

// Level-set percolation of the discrete Gaussian free field on finite boxes.

#include "gfflab/check_report.hpp"
#include "gfflab/estimators.hpp"
#include "gfflab/events.hpp"
#include "gfflab/gaussian_field.hpp"
#include "gfflab/inequalities.hpp"
#include "gfflab/lattice.hpp"
#include "gfflab/levelset.hpp"
#include "gfflab/max_flow.hpp"
#include "gfflab/renormalization.hpp"
#include "gfflab/replicas.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/union_find.hpp"
