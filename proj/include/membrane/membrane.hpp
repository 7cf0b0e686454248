#pragma once

#include "membrane/balance.hpp"
#include "membrane/eigensolver.hpp"
#include "membrane/fem.hpp"
#include "membrane/generators.hpp"
#include "membrane/map_sample.hpp"
#include "membrane/mesh.hpp"
#include "membrane/transplant.hpp"
#include "membrane/types.hpp"
#include "membrane/verify.hpp"
