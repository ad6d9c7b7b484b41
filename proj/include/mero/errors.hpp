// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mero
{

// Failure categories surfaced by the library. Every numerical precondition
// breach maps to one of these instead of propagating NaN/Inf.
enum class ErrorKind
{
  InvalidArgument,
  ShapeMismatch,
  EvaluationAtSpectrum,
  NonInvertible,
  ZeroOnContour,
  UnderResolvedContour,
  PoleOrderExceeded,
  IntegralityViolation,
  NothingToFactor,
  RankGapTooSmall,
  StepLimitExceeded,
  InnerRadiusUnusable,
  NeighborhoodTooLarge,
  DiskConditionViolated,
  HypothesisViolated,
  BirmanSchwingerSingularity,
  CorrespondenceDegenerate,
  NotGraphRepresentable,
  TripleDegenerate,
  PreconditionFailed,
};

std::string_view ToString(ErrorKind kind);

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &what,
        std::optional<std::complex<double>> where = std::nullopt);

  ErrorKind Kind() const noexcept { return kind_; }

  // Point of the complex plane at which the failure was detected, if any.
  const std::optional<std::complex<double>> &Where() const noexcept { return where_; }

private:
  ErrorKind kind_;
  std::optional<std::complex<double>> where_;
};

[[noreturn]] void Throw(ErrorKind kind, const std::string &what,
                        std::optional<std::complex<double>> where = std::nullopt);

}  // namespace mero
