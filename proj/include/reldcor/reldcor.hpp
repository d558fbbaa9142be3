#pragma once

// Self-normalized relevant-hypothesis tests for distance correlation.

#include "reldcor/common.hpp"
#include "reldcor/metric.hpp"
#include "reldcor/dcov.hpp"
#include "reldcor/sequential.hpp"
#include "reldcor/pivotal.hpp"
#include "reldcor/inference.hpp"
#include "reldcor/simlab.hpp"
#include "reldcor/io.hpp"
#include "reldcor/default_table.hpp"
