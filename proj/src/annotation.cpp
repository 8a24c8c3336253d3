#include "protaudit/annotation.hpp"

namespace protaudit {

std::string_view ToString(Gender g) {
  switch (g) {
    case Gender::kFemale:
      return "F";
    case Gender::kMale:
      return "M";
    case Gender::kUnresolved:
      break;
  }
  return "UNRESOLVED";
}

std::string_view ToString(Role r) {
  switch (r) {
    case Role::kProtagonistAgent:
      return "PROT_AGENT";
    case Role::kOtherAgent:
      return "OTHER_AGENT";
    case Role::kNoAgent:
      break;
  }
  return "NO_AGENT";
}

std::optional<Gender> ParseGender(std::string_view s) {
  if (s == "F") return Gender::kFemale;
  if (s == "M") return Gender::kMale;
  if (s == "UNRESOLVED") return Gender::kUnresolved;
  return std::nullopt;
}

std::optional<Role> ParseRole(std::string_view s) {
  if (s == "PROT_AGENT") return Role::kProtagonistAgent;
  if (s == "OTHER_AGENT") return Role::kOtherAgent;
  if (s == "NO_AGENT") return Role::kNoAgent;
  return std::nullopt;
}

}  // namespace protaudit
