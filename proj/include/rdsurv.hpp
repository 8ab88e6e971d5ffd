#pragma once

#include "rdsurv/errors.hpp"
#include "rdsurv/parallel.hpp"
#include "rdsurv/random.hpp"
#include "rdsurv/data.hpp"
#include "rdsurv/csv.hpp"
#include "rdsurv/survival.hpp"
#include "rdsurv/logrank.hpp"
#include "rdsurv/forest.hpp"
#include "rdsurv/censoring.hpp"
#include "rdsurv/rd.hpp"
#include "rdsurv/pipeline.hpp"
#include "rdsurv/simulation.hpp"
#include "rdsurv/diagnostics.hpp"
#include "rdsurv/serialize.hpp"
