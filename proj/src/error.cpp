#include "thesee/error.hpp"

namespace thesee {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
      return "ParseError";
    case ErrorKind::DuplicateThreadId:
      return "DuplicateThreadId";
    case ErrorKind::UndeclaredVariable:
      return "UndeclaredVariable";
    case ErrorKind::UnsupportedMode:
      return "UnsupportedMode";
    case ErrorKind::MultiThreadInput:
      return "MultiThreadInput";
    case ErrorKind::BotNotRepresentable:
      return "BotNotRepresentable";
    case ErrorKind::SideConditionUnverifiable:
      return "SideConditionUnverifiable";
    case ErrorKind::ProgramMismatch:
      return "ProgramMismatch";
    case ErrorKind::Inconclusive:
      return "Inconclusive";
    case ErrorKind::Overflow:
      return "Overflow";
    case ErrorKind::InvalidArgument:
      return "InvalidArgument";
    case ErrorKind::Budget:
      return "BudgetExceeded";
  }
  return "Error";
}

}  // namespace thesee
