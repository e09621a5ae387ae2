#pragma once

#include "convexkit/errors.hpp"
#include "convexkit/rational.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/numeric.hpp"
#include "convexkit/measure.hpp"
#include "convexkit/convexfn.hpp"
#include "convexkit/laplace.hpp"
#include "convexkit/momentum.hpp"
#include "convexkit/mixedvol.hpp"
#include "convexkit/forms.hpp"
