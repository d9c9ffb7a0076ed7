#pragma once

#include <stdexcept>
#include <string>

namespace nner {

/// Error categories surfaced by the library. The CLI maps these onto
/// process exit codes (data errors vs. numeric failures).
enum class ErrorKind {
  parse_error,
  unbalanced_tag,
  unknown_entity_type,
  crossing_spans,
  overlapping_spans,
  invalid_sequence,
  length_mismatch,
  malformed_tag,
  malformed_joint_tag,
  unknown_segmenter,
  missing_lexicon,
  dim_mismatch,
  malformed_line,
  empty_corpus,
  invalid_m,
  no_data,
  unknown_gold_label,
  non_finite_objective,
  fingerprint_mismatch,
  alignment_error,
  io_error,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::unbalanced_tag: return "UnbalancedTag";
    case ErrorKind::unknown_entity_type: return "UnknownEntityType";
    case ErrorKind::crossing_spans: return "CrossingSpans";
    case ErrorKind::overlapping_spans: return "OverlappingSpans";
    case ErrorKind::invalid_sequence: return "InvalidSequence";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::malformed_tag: return "MalformedTag";
    case ErrorKind::malformed_joint_tag: return "MalformedJointTag";
    case ErrorKind::unknown_segmenter: return "UnknownSegmenter";
    case ErrorKind::missing_lexicon: return "MissingLexicon";
    case ErrorKind::dim_mismatch: return "DimMismatch";
    case ErrorKind::malformed_line: return "MalformedLine";
    case ErrorKind::empty_corpus: return "EmptyCorpus";
    case ErrorKind::invalid_m: return "InvalidM";
    case ErrorKind::no_data: return "NoData";
    case ErrorKind::unknown_gold_label: return "UnknownGoldLabel";
    case ErrorKind::non_finite_objective: return "NonFiniteObjective";
    case ErrorKind::fingerprint_mismatch: return "FingerprintMismatch";
    case ErrorKind::alignment_error: return "AlignmentError";
    case ErrorKind::io_error: return "IoError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace nner
