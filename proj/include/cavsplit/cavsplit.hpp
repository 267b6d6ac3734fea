#pragma once

#include "cavsplit/cavity.hpp"
#include "cavsplit/constants.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/faddeeva.hpp"
#include "cavsplit/fit.hpp"
#include "cavsplit/medium.hpp"
#include "cavsplit/nelder_mead.hpp"
#include "cavsplit/spectrum.hpp"

#define CAVSPLIT_VERSION "0.1.0"
