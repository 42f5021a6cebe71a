#pragma once

#include "isospec/error.hpp"
#include "isospec/grid.hpp"
#include "isospec/spectral.hpp"
#include "isospec/base_problem.hpp"
#include "isospec/chain.hpp"
#include "isospec/closed_form.hpp"
#include "isospec/verify.hpp"
