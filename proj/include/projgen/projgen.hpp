#pragma once

#include "projgen/algebra.hpp"
#include "projgen/construction.hpp"
#include "projgen/errors.hpp"
#include "projgen/linalg.hpp"
#include "projgen/pgen.hpp"
