#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace onefactor {

enum class ErrorCode {
  SelfLoop,
  DuplicateEdge,
  VertexOutOfRange,
  UnknownVertex,
  UnknownEdge,
  InfeasibleDegree,
  RetryBudgetExhausted,
  NotBipartite,
  UnbalancedParts,
  RequestTooLarge,
  DiracViolated,
  ConstructionFailed,
  NotRegular,
  DomainError,
  BadK,
  PreconditionViolated,
  ResampleGoodGraph,
  InvariantBroken,
  GreedyStuck,
  TooLarge,
  OddOrder,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI's exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace onefactor
