#pragma once

#include "coefficients.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "fast_slow.hpp"
#include "model.hpp"
#include "normal_form.hpp"
#include "ode.hpp"
#include "phase_plane.hpp"
#include "spectral.hpp"
#include "validation.hpp"
#include "waves.hpp"
