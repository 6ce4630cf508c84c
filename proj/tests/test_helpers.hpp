#pragma once

#include "metspace/fields.hpp"
#include "metspace/verify.hpp"

#include <cstdint>

namespace metspace::testing {

inline SmallMat mat2(double a, double b, double c, double d) {
  SmallMat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline SmallMat diag2(double a, double b) { return mat2(a, 0, 0, b); }

inline SmallMat ident(int dim) { return SmallMat::Identity(dim, dim); }

}  // namespace metspace::testing
