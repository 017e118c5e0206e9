#pragma once

#include "qes/error.hpp"
#include "qes/funcspace.hpp"
#include "qes/susy_core.hpp"
#include "qes/constructors.hpp"
#include "qes/families.hpp"
#include "qes/expr.hpp"
#include "qes/verify.hpp"
#include "qes/io.hpp"
