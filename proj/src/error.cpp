#include "sapo/error.hpp"

namespace sapo {

const char* err_name(Err code) {
  switch (code) {
    case Err::EmptyGraph: return "EmptyGraph";
    case Err::AnswerNodeMissing: return "AnswerNodeMissing";
    case Err::UnknownNode: return "UnknownNode";
    case Err::InvalidDecay: return "InvalidDecay";
    case Err::InvalidLabel: return "InvalidLabel";
    case Err::AmbiguousSurfaceForm: return "AmbiguousSurfaceForm";
    case Err::LexiconGraphMismatch: return "LexiconGraphMismatch";
    case Err::EmptyTrajectory: return "EmptyTrajectory";
    case Err::GroupTooSmall: return "GroupTooSmall";
    case Err::DegenerateVariance: return "DegenerateVariance";
    case Err::EmptyCandidateSet: return "EmptyCandidateSet";
    case Err::MissingAdvantage: return "MissingAdvantage";
    case Err::InvalidSize: return "InvalidSize";
    case Err::SynthesisExhausted: return "SynthesisExhausted";
    case Err::GraphNotFound: return "GraphNotFound";
    case Err::ParseError: return "ParseError";
    case Err::InvalidConfig: return "InvalidConfig";
    case Err::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace sapo
