#pragma once

#include <stdexcept>
#include <string>

namespace subshift {

// Exit-code classes shared by the library and the command-line tool.
enum class ErrorClass { input = 1, hypothesis = 2, verification = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(what), cls_(cls), kind_(std::move(kind)) {}
  ErrorClass error_class() const { return cls_; }
  int exit_code() const { return static_cast<int>(cls_); }
  const std::string& kind() const { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

struct InputError : Error {
  explicit InputError(const std::string& what, std::string kind = "InputError")
      : Error(ErrorClass::input, std::move(kind), what) {}
};

struct HypothesisViolation : Error {
  explicit HypothesisViolation(const std::string& what, std::string kind = "HypothesisViolation")
      : Error(ErrorClass::hypothesis, std::move(kind), what) {}
};

struct VerificationFailure : Error {
  explicit VerificationFailure(const std::string& what, std::string kind = "VerificationFailure")
      : Error(ErrorClass::verification, std::move(kind), what) {}
};

}  // namespace subshift
