#pragma once

// Umbrella header.

#include "pearcey/asymptotics.hpp"
#include "pearcey/bessel.hpp"
#include "pearcey/bessel_parametrix.hpp"
#include "pearcey/contour.hpp"
#include "pearcey/core.hpp"
#include "pearcey/gamma.hpp"
#include "pearcey/kernel.hpp"
#include "pearcey/linalg.hpp"
#include "pearcey/nystrom.hpp"
#include "pearcey/parametrix.hpp"
#include "pearcey/pk.hpp"
#include "pearcey/quadrature.hpp"
#include "pearcey/richardson.hpp"
#include "pearcey/surface.hpp"
