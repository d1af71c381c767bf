#pragma once

#include "qcausal/params.hpp"
#include "qcausal/config.hpp"
#include "qcausal/lattice.hpp"
#include "qcausal/bounds.hpp"
#include "qcausal/gates.hpp"
#include "qcausal/qram.hpp"
#include "qcausal/sweep.hpp"
#include "qcausal/verify.hpp"
