#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protaudit {

// Conceptual gender of a protagonist, inferred from pronouns only.
enum class Gender { kFemale, kMale, kUnresolved };

// Who is the agent of a sentence.
enum class Role { kProtagonistAgent, kOtherAgent, kNoAgent };

std::string_view ToString(Gender g);  // "F", "M", "UNRESOLVED"
std::string_view ToString(Role r);    // "PROT_AGENT", "OTHER_AGENT", "NO_AGENT"
std::optional<Gender> ParseGender(std::string_view s);
std::optional<Role> ParseRole(std::string_view s);

// Stories labelled kUnresolved take no part in gendered aggregation.
struct ProtagonistAnnotation {
  std::string story_id;
  int protagonist_cluster = -1;
  Gender gender = Gender::kUnresolved;
  std::map<std::string, int> pronoun_counts;  // lowercase pronoun -> count
  std::vector<Role> sentence_roles;            // one per sentence

  bool gendered() const { return gender != Gender::kUnresolved; }
  bool operator==(const ProtagonistAnnotation&) const = default;
};

}  // namespace protaudit
