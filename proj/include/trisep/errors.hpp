#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trisep {

// Every failure raised by the library derives from Error. name() is the
// stable identifier the CLI prints when it refuses an input.
class Error : public std::runtime_error {
 public:
  Error(const char* name, const std::string& message)
      : std::runtime_error(message), name_(name) {}

  const char* name() const noexcept { return name_; }

 private:
  const char* name_;
};

#define TRISEP_SIMPLE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

TRISEP_SIMPLE_ERROR(IndexError);
TRISEP_SIMPLE_ERROR(DimsError);
TRISEP_SIMPLE_ERROR(SubsetError);
TRISEP_SIMPLE_ERROR(ArgumentError);
TRISEP_SIMPLE_ERROR(FilterSingularError);
TRISEP_SIMPLE_ERROR(HermiticityError);
TRISEP_SIMPLE_ERROR(NotInRangeError);
TRISEP_SIMPLE_ERROR(DegenerateVectorError);
TRISEP_SIMPLE_ERROR(InternalConsistencyError);
TRISEP_SIMPLE_ERROR(NotPptError);
TRISEP_SIMPLE_ERROR(PivotRankError);
TRISEP_SIMPLE_ERROR(PivotNotFoundError);
TRISEP_SIMPLE_ERROR(InvalidCanonicalError);
TRISEP_SIMPLE_ERROR(RankMismatchError);
TRISEP_SIMPLE_ERROR(InvalidDecompositionError);
TRISEP_SIMPLE_ERROR(KernelEmptyError);
TRISEP_SIMPLE_ERROR(StructureViolationError);
TRISEP_SIMPLE_ERROR(FormatError);

#undef TRISEP_SIMPLE_ERROR

class NotCommutingError : public Error {
 public:
  NotCommutingError(const std::string& message, int first, int second, double norm)
      : Error("NotCommutingError", message), first_(first), second_(second), norm_(norm) {}

  // Indices into the operator list; first == second flags a non-normal input.
  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }
  double norm() const noexcept { return norm_; }

 private:
  int first_;
  int second_;
  double norm_;
};

class NotCanonicalizableError : public Error {
 public:
  NotCanonicalizableError(const std::string& message, std::vector<std::pair<int, int>> blocks)
      : Error("NotCanonicalizableError", message), blocks_(std::move(blocks)) {}

  // 0-based (row, column) coordinates of the offending 6x6 grid blocks.
  const std::vector<std::pair<int, int>>& blocks() const noexcept { return blocks_; }

 private:
  std::vector<std::pair<int, int>> blocks_;
};

class DecompositionFailedError : public Error {
 public:
  DecompositionFailedError(const std::string& message, double residual)
      : Error("DecompositionFailedError", message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NoProductKernelVectorError : public Error {
 public:
  NoProductKernelVectorError(const std::string& message, double best_residual)
      : Error("NoProductKernelVectorError", message), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace trisep
