#pragma once

#include "analysis.hpp"
#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "radon.hpp"
#include "refinement.hpp"
#include "transform.hpp"
