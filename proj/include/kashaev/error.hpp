#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kashaev {

enum class ErrorKind {
  NegativeRadicand,
  InexactSquareRoot,
  ModeMismatch,
  ZeroBaseVertex,
  ZeroVertexValue,
  NeighborhoodIncomplete,
  NotCoherent,
  ZeroFaceExpression,
  NonConvergent,
  VertexMismatch,
  BadN,
  NotFlippable,
  NotAdmissible,
  InvalidPile,
  InvalidComplex,
  MissingValue,
  NotComfortable,
  Ungeneric,
  BadBase,
  NotRealizable,
  DegenerateOffDiagonal,
  UnlabeledVertex,
  MissingMinor,
  ZeroMinor,
  BadParams,
  ZeroG,
  ZeroDenominator,
  InvalidInput,
};

inline std::string_view kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::InexactSquareRoot: return "InexactSquareRoot";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::ZeroBaseVertex: return "ZeroBaseVertex";
    case ErrorKind::ZeroVertexValue: return "ZeroVertexValue";
    case ErrorKind::NeighborhoodIncomplete: return "NeighborhoodIncomplete";
    case ErrorKind::NotCoherent: return "NotCoherent";
    case ErrorKind::ZeroFaceExpression: return "ZeroFaceExpression";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::VertexMismatch: return "VertexMismatch";
    case ErrorKind::BadN: return "BadN";
    case ErrorKind::NotFlippable: return "NotFlippable";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::InvalidPile: return "InvalidPile";
    case ErrorKind::InvalidComplex: return "InvalidComplex";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::NotComfortable: return "NotComfortable";
    case ErrorKind::Ungeneric: return "Ungeneric";
    case ErrorKind::BadBase: return "BadBase";
    case ErrorKind::NotRealizable: return "NotRealizable";
    case ErrorKind::DegenerateOffDiagonal: return "DegenerateOffDiagonal";
    case ErrorKind::UnlabeledVertex: return "UnlabeledVertex";
    case ErrorKind::MissingMinor: return "MissingMinor";
    case ErrorKind::ZeroMinor: return "ZeroMinor";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::ZeroG: return "ZeroG";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kashaev
