// SPDX-License-Identifier: Apache-2.0

#include "mero/matfun.hpp"

#include <sstream>
#include <utility>

#include "mero/errors.hpp"

namespace mero
{

MatrixFunction::MatrixFunction(Eigen::Index rows, Eigen::Index cols, Evaluator eval,
                               std::optional<Evaluator> deriv, std::vector<Complex> singular_hints)
  : rows_(rows), cols_(cols), eval_(std::move(eval)), deriv_(std::move(deriv)),
    hints_(std::move(singular_hints))
{
  if (rows < 0 || cols < 0 || !eval_)
  {
    Throw(ErrorKind::InvalidArgument, "MatrixFunction needs a shape and an evaluator");
  }
}

namespace
{

void CheckShape(const ComplexMatrix &m, Eigen::Index rows, Eigen::Index cols, Complex z)
{
  if (m.rows() != rows || m.cols() != cols)
  {
    std::ostringstream os;
    os << "evaluator returned " << m.rows() << "x" << m.cols() << ", declared " << rows << "x"
       << cols;
    Throw(ErrorKind::ShapeMismatch, os.str(), z);
  }
}

}  // namespace

ComplexMatrix MatrixFunction::operator()(Complex z) const
{
  ComplexMatrix m = eval_(z);
  CheckShape(m, rows_, cols_, z);
  return m;
}

ComplexMatrix MatrixFunction::Derivative(Complex z) const
{
  if (!deriv_)
  {
    Throw(ErrorKind::PreconditionFailed, "no stored derivative", z);
  }
  ComplexMatrix m = (*deriv_)(z);
  CheckShape(m, rows_, cols_, z);
  return m;
}

MatrixFunction Constant(const ComplexMatrix &value)
{
  const Eigen::Index r = value.rows(), c = value.cols();
  return MatrixFunction(
      r, c, [value](Complex) { return value; },
      [r, c](Complex) -> ComplexMatrix { return ComplexMatrix::Zero(r, c); });
}

MatrixFunction FromPencil(const ComplexMatrix &a, const ComplexMatrix &b)
{
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
  {
    Throw(ErrorKind::ShapeMismatch, "pencil matrices must be square and of equal size");
  }
  return MatrixFunction(
      a.rows(), a.cols(), [a, b](Complex z) -> ComplexMatrix { return a - z * b; },
      [b](Complex) -> ComplexMatrix { return -b; });
}

MatrixFunction Resolvent(const ComplexMatrix &t)
{
  if (t.rows() != t.cols())
  {
    Throw(ErrorKind::ShapeMismatch, "resolvent of a non-square matrix");
  }
  auto eval = [t](Complex z) -> ComplexMatrix {
    const ComplexMatrix shifted = t - z * Identity(t.rows());
    std::optional<ComplexMatrix> inv = TryInverse(shifted);
    if (!inv)
    {
      Throw(ErrorKind::EvaluationAtSpectrum, "resolvent evaluated at the spectrum", z);
    }
    return *inv;
  };
  auto deriv = [eval](Complex z) -> ComplexMatrix {
    const ComplexMatrix r = eval(z);
    return r * r;
  };
  return MatrixFunction(t.rows(), t.cols(), eval, deriv);
}

MatrixFunction Product(const MatrixFunction &f, const MatrixFunction &g)
{
  if (f.Cols() != g.Rows())
  {
    Throw(ErrorKind::ShapeMismatch, "product inner dimensions differ");
  }
  auto eval = [f, g](Complex z) -> ComplexMatrix { return f(z) * g(z); };
  std::optional<MatrixFunction::Evaluator> deriv;
  if (f.HasDerivative() && g.HasDerivative())
  {
    deriv = [f, g](Complex z) -> ComplexMatrix {
      return f.Derivative(z) * g(z) + f(z) * g.Derivative(z);
    };
  }
  std::vector<Complex> hints = f.SingularHints();
  hints.insert(hints.end(), g.SingularHints().begin(), g.SingularHints().end());
  return MatrixFunction(f.Rows(), g.Cols(), eval, deriv, hints);
}

MatrixFunction Inverse(const MatrixFunction &f)
{
  if (!f.IsSquare())
  {
    Throw(ErrorKind::ShapeMismatch, "inverse of a non-square function");
  }
  auto eval = [f](Complex z) -> ComplexMatrix { return InverseChecked(f(z), z); };
  std::optional<MatrixFunction::Evaluator> deriv;
  if (f.HasDerivative())
  {
    deriv = [f](Complex z) -> ComplexMatrix {
      const ComplexMatrix inv = InverseChecked(f(z), z);
      return -inv * f.Derivative(z) * inv;
    };
  }
  return MatrixFunction(f.Rows(), f.Cols(), eval, deriv, f.SingularHints());
}

MatrixFunction Sum(const MatrixFunction &f, const MatrixFunction &g)
{
  if (f.Rows() != g.Rows() || f.Cols() != g.Cols())
  {
    Throw(ErrorKind::ShapeMismatch, "sum of functions with different shapes");
  }
  auto eval = [f, g](Complex z) -> ComplexMatrix { return f(z) + g(z); };
  std::optional<MatrixFunction::Evaluator> deriv;
  if (f.HasDerivative() && g.HasDerivative())
  {
    deriv = [f, g](Complex z) -> ComplexMatrix { return f.Derivative(z) + g.Derivative(z); };
  }
  std::vector<Complex> hints = f.SingularHints();
  hints.insert(hints.end(), g.SingularHints().begin(), g.SingularHints().end());
  return MatrixFunction(f.Rows(), f.Cols(), eval, deriv, hints);
}

MatrixFunction Scale(const MatrixFunction &f, Complex alpha)
{
  auto eval = [f, alpha](Complex z) -> ComplexMatrix { return alpha * f(z); };
  std::optional<MatrixFunction::Evaluator> deriv;
  if (f.HasDerivative())
  {
    deriv = [f, alpha](Complex z) -> ComplexMatrix { return alpha * f.Derivative(z); };
  }
  return MatrixFunction(f.Rows(), f.Cols(), eval, deriv, f.SingularHints());
}

MatrixFunction Shift(const MatrixFunction &f, Complex shift)
{
  auto eval = [f, shift](Complex z) -> ComplexMatrix { return f(z + shift); };
  std::optional<MatrixFunction::Evaluator> deriv;
  if (f.HasDerivative())
  {
    deriv = [f, shift](Complex z) -> ComplexMatrix { return f.Derivative(z + shift); };
  }
  std::vector<Complex> hints;
  for (const Complex h : f.SingularHints())
  {
    hints.push_back(h - shift);
  }
  return MatrixFunction(f.Rows(), f.Cols(), eval, deriv, hints);
}

MatrixFunction DiagonalPowers(const std::vector<int> &powers, Complex center)
{
  const auto n = static_cast<Eigen::Index>(powers.size());
  bool has_pole = false;
  for (const int p : powers)
  {
    has_pole = has_pole || p < 0;
  }
  auto eval = [powers, center, n](Complex z) -> ComplexMatrix {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    const Complex w = z - center;
    for (Eigen::Index i = 0; i < n; ++i)
    {
      const int p = powers[static_cast<std::size_t>(i)];
      if (p < 0 && w == 0.0)
      {
        Throw(ErrorKind::EvaluationAtSpectrum, "pole of a diagonal power", z);
      }
      m(i, i) = IntPow(w, p);
    }
    return m;
  };
  auto deriv = [powers, center, n](Complex z) -> ComplexMatrix {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    const Complex w = z - center;
    for (Eigen::Index i = 0; i < n; ++i)
    {
      const int p = powers[static_cast<std::size_t>(i)];
      if (p == 0)
      {
        continue;
      }
      if (p < 1 && w == 0.0)
      {
        Throw(ErrorKind::EvaluationAtSpectrum, "pole of a diagonal power", z);
      }
      m(i, i) = static_cast<double>(p) * IntPow(w, p - 1);
    }
    return m;
  };
  std::vector<Complex> hints;
  if (has_pole)
  {
    hints.push_back(center);
  }
  return MatrixFunction(n, n, eval, deriv, hints);
}

ComplexMatrix DerivativeAt(const MatrixFunction &f, Complex z, double r, int nodes)
{
  if (f.HasDerivative())
  {
    return f.Derivative(z);
  }
  const Contour c(z, r, nodes);
  return CauchyIntegral(
      [&f, z](Complex zeta) -> ComplexMatrix {
        const Complex w = zeta - z;
        return f(zeta) / (w * w);
      },
      c);
}

ComplexMatrix FiniteDifference(const MatrixFunction &f, Complex z, double h)
{
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

}  // namespace mero
