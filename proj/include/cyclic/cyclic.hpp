#pragma once

#include "cyclic/builtins.hpp"
#include "cyclic/densities.hpp"
#include "cyclic/errors.hpp"
#include "cyclic/estimator.hpp"
#include "cyclic/experiments.hpp"
#include "cyclic/io.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/lattice.hpp"
#include "cyclic/parallel.hpp"
#include "cyclic/quadrature.hpp"
#include "cyclic/rng.hpp"
#include "cyclic/solver.hpp"
#include "cyclic/spline.hpp"
#include "cyclic/summation.hpp"
