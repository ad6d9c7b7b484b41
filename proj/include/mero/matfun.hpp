// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mero/contour.hpp"
#include "mero/linalg.hpp"

namespace mero
{

// An analytic or meromorphic matrix-valued function given by point
// evaluators. The optional derivative, when supplied, must be the exact
// complex derivative of the evaluator.
//
// Instances are immutable and cheap to copy; evaluators are shared and must
// be re-entrant so that a function can be evaluated from several threads.
class MatrixFunction
{
public:
  using Evaluator = std::function<ComplexMatrix(Complex)>;

  MatrixFunction(Eigen::Index rows, Eigen::Index cols, Evaluator eval,
                 std::optional<Evaluator> deriv = std::nullopt,
                 std::vector<Complex> singular_hints = {});

  Eigen::Index Rows() const noexcept { return rows_; }
  Eigen::Index Cols() const noexcept { return cols_; }
  bool IsSquare() const noexcept { return rows_ == cols_; }
  Eigen::Index Dim() const noexcept { return rows_; }

  // Evaluates and checks the declared shape.
  ComplexMatrix operator()(Complex z) const;

  bool HasDerivative() const noexcept { return deriv_.has_value(); }
  // Stored analytic derivative; throws PreconditionFailed if absent.
  ComplexMatrix Derivative(Complex z) const;

  // Known singular points; advisory only.
  const std::vector<Complex> &SingularHints() const noexcept { return hints_; }

  const Evaluator &Eval() const noexcept { return eval_; }
  const std::optional<Evaluator> &Deriv() const noexcept { return deriv_; }

private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Evaluator eval_;
  std::optional<Evaluator> deriv_;
  std::vector<Complex> hints_;
};

// Constant function with zero derivative.
MatrixFunction Constant(const ComplexMatrix &value);

// z -> a - z * b, derivative -b.
MatrixFunction FromPencil(const ComplexMatrix &a, const ComplexMatrix &b);

// z -> (t - z I)^{-1}, derivative R(z)^2. Evaluation at the spectrum throws
// EvaluationAtSpectrum carrying z.
MatrixFunction Resolvent(const ComplexMatrix &t);

// Pointwise f(z) g(z); derivative f'g + fg' when both derivatives exist.
MatrixFunction Product(const MatrixFunction &f, const MatrixFunction &g);

// Pointwise f(z)^{-1}; derivative -f^{-1} f' f^{-1} when f' exists.
MatrixFunction Inverse(const MatrixFunction &f);

// Pointwise f(z) + g(z).
MatrixFunction Sum(const MatrixFunction &f, const MatrixFunction &g);

// Pointwise alpha * f(z).
MatrixFunction Scale(const MatrixFunction &f, Complex alpha);

// z -> f(z + shift).
MatrixFunction Shift(const MatrixFunction &f, Complex shift);

// Diagonal function with entries (z - center)^{powers[i]}; negative powers
// give poles at center.
MatrixFunction DiagonalPowers(const std::vector<int> &powers, Complex center);

// Analytic derivative if stored, otherwise the Cauchy differentiation
// integral (1/2 pi i) * integral of F(zeta) / (zeta - z)^2 over C(z; r).
ComplexMatrix DerivativeAt(const MatrixFunction &f, Complex z, double r,
                           int nodes = kDefaultContourNodes);

// Central finite difference, used to validate stored derivatives.
ComplexMatrix FiniteDifference(const MatrixFunction &f, Complex z, double h = 1e-6);

}  // namespace mero
