#pragma once

#include "dtc/core_state.hpp"
#include "dtc/floquet.hpp"
#include "dtc/magnon.hpp"
#include "dtc/observables.hpp"
#include "dtc/spectral.hpp"
