#pragma once

#include "subshift/columns.hpp"
#include "subshift/core.hpp"
#include "subshift/error.hpp"
#include "subshift/fibres.hpp"
#include "subshift/height.hpp"
#include "subshift/lattice.hpp"
#include "subshift/legal.hpp"
#include "subshift/manifest.hpp"
#include "subshift/render.hpp"
#include "subshift/symmetry.hpp"
