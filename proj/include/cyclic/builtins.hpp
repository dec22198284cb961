#pragma once

#include <string>
#include <vector>

#include "cyclic/densities.hpp"
#include "cyclic/errors.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/solver.hpp"

namespace cyclic {

enum class BuiltinKernel { fourier, haar, spline, cauchy_optimal };

inline BuiltinKernel parse_builtin(const std::string& name) {
  if (name == "fourier" || name == "sin") return BuiltinKernel::fourier;
  if (name == "haar") return BuiltinKernel::haar;
  if (name == "spline") return BuiltinKernel::spline;
  if (name == "cauchy_optimal" || name == "cauchy-opt" || name == "cauchy-optimal") {
    return BuiltinKernel::cauchy_optimal;
  }
  throw ValidationError("unknown kernel '" + name +
                        "' (expected fourier, haar, spline or cauchy-opt)");
}

inline bool is_builtin_name(const std::string& name) {
  try {
    parse_builtin(name);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

inline CyclicKernel make_builtin(BuiltinKernel which) {
  switch (which) {
    case BuiltinKernel::fourier:
      return fourier_kernel();
    case BuiltinKernel::haar:
      return haar_kernel();
    case BuiltinKernel::spline:
      return spline_kernel();
    case BuiltinKernel::cauchy_optimal:
      return solve_optimal_kernel(cauchy_density()).kernel.renamed("cauchy_optimal");
  }
  throw ValidationError("unknown builtin kernel");
}

inline CyclicKernel make_builtin(const std::string& name) { return make_builtin(parse_builtin(name)); }

inline std::vector<BuiltinKernel> all_builtins() {
  return {BuiltinKernel::fourier, BuiltinKernel::haar, BuiltinKernel::spline,
          BuiltinKernel::cauchy_optimal};
}

}  // namespace cyclic
