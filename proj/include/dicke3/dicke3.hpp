#pragma once

#include "dicke3/analysis.hpp"
#include "dicke3/common.hpp"
#include "dicke3/config.hpp"
#include "dicke3/correlations.hpp"
#include "dicke3/coupling.hpp"
#include "dicke3/dynamics.hpp"
#include "dicke3/experiment.hpp"
#include "dicke3/geometry.hpp"
#include "dicke3/hilbert.hpp"
#include "dicke3/parallel.hpp"
