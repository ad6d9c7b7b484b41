// SPDX-License-Identifier: Apache-2.0

#include "mero/errors.hpp"

#include <sstream>

namespace mero
{

std::string_view ToString(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::InvalidArgument:
      return "invalid argument";
    case ErrorKind::ShapeMismatch:
      return "shape mismatch";
    case ErrorKind::EvaluationAtSpectrum:
      return "evaluation at spectrum";
    case ErrorKind::NonInvertible:
      return "non-invertible";
    case ErrorKind::ZeroOnContour:
      return "zero/pole on contour";
    case ErrorKind::UnderResolvedContour:
      return "under-resolved contour, increase N";
    case ErrorKind::PoleOrderExceeded:
      return "pole order exceeds kmax";
    case ErrorKind::IntegralityViolation:
      return "integrality violation";
    case ErrorKind::NothingToFactor:
      return "nothing to factor";
    case ErrorKind::RankGapTooSmall:
      return "rank gap too small";
    case ErrorKind::StepLimitExceeded:
      return "step limit exceeded";
    case ErrorKind::InnerRadiusUnusable:
      return "inner radius unusable, retry smaller";
    case ErrorKind::NeighborhoodTooLarge:
      return "neighborhood too large";
    case ErrorKind::DiskConditionViolated:
      return "disk condition violated";
    case ErrorKind::HypothesisViolated:
      return "hypothesis violated";
    case ErrorKind::BirmanSchwingerSingularity:
      return "Birman-Schwinger singularity";
    case ErrorKind::CorrespondenceDegenerate:
      return "correspondence degenerate";
    case ErrorKind::NotGraphRepresentable:
      return "multivalued part present: restriction is not graph-representable";
    case ErrorKind::TripleDegenerate:
      return "triple degenerate";
    case ErrorKind::PreconditionFailed:
      return "precondition failed";
  }
  return "unknown";
}

namespace
{

std::string Compose(ErrorKind kind, const std::string &what,
                    const std::optional<std::complex<double>> &where)
{
  std::ostringstream os;
  os << ToString(kind);
  if (!what.empty())
  {
    os << ": " << what;
  }
  if (where)
  {
    os << " (at z = " << where->real() << (where->imag() < 0 ? "-" : "+")
       << std::abs(where->imag()) << "i)";
  }
  return os.str();
}

}  // namespace

Error::Error(ErrorKind kind, const std::string &what, std::optional<std::complex<double>> where)
  : std::runtime_error(Compose(kind, what, where)), kind_(kind), where_(where)
{
}

void Throw(ErrorKind kind, const std::string &what, std::optional<std::complex<double>> where)
{
  throw Error(kind, what, where);
}

}  // namespace mero
