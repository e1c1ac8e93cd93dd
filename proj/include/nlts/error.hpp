#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlts {

enum class Errc {
  DimensionMismatch,
  CapExceeded,
  InvalidGroup,
  AsymmetricGenerators,
  DegenerateFace,
  ConvergenceFailure,
  NotBipartite,
  NotLeftRegular,
  LengthMismatch,
  DegreeMismatch,
  NotOrthogonal,
  OrthogonalityFailure,
  NotNormalized,
  InvalidCircuit,
  EnvelopeFailure,
  PreconditionFailed,
  DegenerateCode,
  InvalidConfig,
  ParseError,
  IoFailure,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::InvalidGroup: return "InvalidGroup";
    case Errc::AsymmetricGenerators: return "AsymmetricGenerators";
    case Errc::DegenerateFace: return "DegenerateFace";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NotBipartite: return "NotBipartite";
    case Errc::NotLeftRegular: return "NotLeftRegular";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::NotOrthogonal: return "NotOrthogonal";
    case Errc::OrthogonalityFailure: return "OrthogonalityFailure";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::InvalidCircuit: return "InvalidCircuit";
    case Errc::EnvelopeFailure: return "EnvelopeFailure";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::DegenerateCode: return "DegenerateCode";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ParseError: return "ParseError";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace nlts
