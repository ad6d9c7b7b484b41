// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <doctest.h>

#include "mero/errors.hpp"
#include "mero/linalg.hpp"

namespace mero::test
{

inline ComplexMatrix Diag(std::initializer_list<Complex> values)
{
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const Complex &c : values)
  {
    v(i++) = c;
  }
  return v.asDiagonal();
}

inline ComplexMatrix Mat(std::initializer_list<std::initializer_list<Complex>> rows)
{
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  ComplexMatrix m(r, c);
  Eigen::Index i = 0;
  for (const auto &row : rows)
  {
    Eigen::Index j = 0;
    for (const Complex &v : row)
    {
      m(i, j++) = v;
    }
    ++i;
  }
  return m;
}

inline ComplexMatrix J2()
{
  return Mat({{0.0, 1.0}, {0.0, 0.0}});
}

inline double Dist(const ComplexMatrix &a, const ComplexMatrix &b)
{
  return (a - b).norm();
}

template <typename F>
ErrorKind KindOf(F &&f)
{
  try
  {
    f();
  }
  catch (const Error &e)
  {
    return e.Kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace mero::test
