#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conductor {

/// Base of every error the engine raises. `code()` is a stable machine name
/// used by the CLI exit-code mapping and by the HTTP error payloads.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

    /// Domain errors (conflicts, capacity, unknown ids) as opposed to I/O or parse faults.
    virtual bool is_domain() const noexcept { return true; }

  private:
    std::string code_;
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& message) : Error("IoError", message) {}
    bool is_domain() const noexcept override { return false; }
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& message)
        : Error("ParseError", "line " + std::to_string(line) + ": " + message), line_(line) {}
    explicit ParseError(const std::string& message) : Error("ParseError", message) {}

    /// 1-based line number, 0 when the input is not line oriented.
    std::size_t line() const noexcept { return line_; }
    bool is_domain() const noexcept override { return false; }

  private:
    std::size_t line_ = 0;
};

#define CONDUCTOR_DOMAIN_ERROR(Name)                                          \
    class Name : public Error {                                               \
      public:                                                                 \
        explicit Name(const std::string& message) : Error(#Name, message) {}  \
    }

CONDUCTOR_DOMAIN_ERROR(UnknownQuestion);
CONDUCTOR_DOMAIN_ERROR(PhaseMismatch);
CONDUCTOR_DOMAIN_ERROR(MissingPolarity);
CONDUCTOR_DOMAIN_ERROR(UnknownNode);
CONDUCTOR_DOMAIN_ERROR(DuplicateEvent);
CONDUCTOR_DOMAIN_ERROR(EmptyCaseId);
CONDUCTOR_DOMAIN_ERROR(ReservedAttribute);
CONDUCTOR_DOMAIN_ERROR(MissingCaseId);
CONDUCTOR_DOMAIN_ERROR(DegenerateLog);
CONDUCTOR_DOMAIN_ERROR(PlanTopologyMismatch);
CONDUCTOR_DOMAIN_ERROR(SeedMismatch);
CONDUCTOR_DOMAIN_ERROR(InvalidConfig);
CONDUCTOR_DOMAIN_ERROR(InvalidTopology);
CONDUCTOR_DOMAIN_ERROR(UnknownFixture);

#undef CONDUCTOR_DOMAIN_ERROR

}  // namespace conductor
