#pragma once

#include <stdexcept>
#include <string>

namespace sapo {

enum class Err {
  EmptyGraph,
  AnswerNodeMissing,
  UnknownNode,
  InvalidDecay,
  InvalidLabel,
  AmbiguousSurfaceForm,
  LexiconGraphMismatch,
  EmptyTrajectory,
  GroupTooSmall,
  DegenerateVariance,
  EmptyCandidateSet,
  MissingAdvantage,
  InvalidSize,
  SynthesisExhausted,
  GraphNotFound,
  ParseError,
  InvalidConfig,
  IoError,
};

const char* err_name(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace sapo
