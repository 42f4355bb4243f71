#pragma once

#include "model.hpp"
#include "goursat.hpp"
#include "parametric.hpp"
#include "channel_series.hpp"
#include "halfplane_closed.hpp"
#include "parallel.hpp"
#include "flow_eval.hpp"
#include "transform_oracle.hpp"
#include "validation.hpp"

namespace stokes_lattice {
inline constexpr const char* version = "1.0.0";
}
