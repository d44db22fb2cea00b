#pragma once

#include <stdexcept>
#include <string>

namespace authpipe {

// Bad input or configuration; the CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while executing an otherwise valid request; CLI exit code 2.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss during training; the runner records the cell as failed
// instead of aborting the whole matrix.
class TrainingDiverged : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

}  // namespace authpipe
