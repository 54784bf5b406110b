#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "smishaug/text.hpp"

namespace smishaug {

// The five persuasion principles used to annotate smishing messages.
enum class Principle : std::uint8_t {
  Authority = 0,
  SocialProof = 1,
  LikingSimilarityDeception = 2,
  Distraction = 3,
  CommitmentIntegrityReciprocation = 4,
};

inline constexpr std::size_t kPrincipleCount = 5;

inline constexpr std::array<Principle, kPrincipleCount> kAllPrinciples = {
    Principle::Authority, Principle::SocialProof, Principle::LikingSimilarityDeception,
    Principle::Distraction, Principle::CommitmentIntegrityReciprocation};

inline constexpr std::size_t principle_index(Principle p) { return static_cast<std::size_t>(p); }

inline constexpr std::string_view principle_code(Principle p) {
  constexpr std::array<std::string_view, kPrincipleCount> codes = {"P1", "P2", "P3", "P4", "P5"};
  return codes[principle_index(p)];
}

inline constexpr std::string_view principle_name(Principle p) {
  constexpr std::array<std::string_view, kPrincipleCount> names = {
      "Authority", "Social Proof", "Liking, Similarity, and Deception", "Distraction",
      "Commitment, Integrity, and Reciprocation"};
  return names[principle_index(p)];
}

inline constexpr std::string_view principle_definition(Principle p) {
  constexpr std::array<std::string_view, kPrincipleCount> defs = {
      "This principle operates on the premise that society conditions individuals to respect "
      "and follow authority figures without questioning. People are inclined to comply with "
      "experts or authoritative figures, as demonstrated in scenarios such as receiving an "
      "email purportedly from the recipient's bank, featuring the bank name in the subject "
      "line.",
      "Centered on the tendency for individuals to emulate the behavior of the majority, this "
      "principle suggests that people lower their guard when they perceive others engaging in "
      "similar actions. An example includes an email from an alleged system administrator, "
      "using an email address from the recipient's workplace, requesting the recipient to test "
      "a link also being tested by colleagues.",
      "This principle underscores people's inclination to follow or relate to individuals they "
      "know, like, or find attractive. However, the principle notes that appearances can be "
      "deceiving, exemplified by an email from a supposed friend urging the recipient to visit "
      "an intriguing website.",
      "Focused on diverting attention by emphasizing gains, losses, emotional states, or "
      "scarcity, this principle heightens emotional states to influence decision-making. For "
      "instance, an email claiming the recipient won a substantial lottery prize strategically "
      "shifts the focus from crucial details, such as the absence of a purchased lottery "
      "ticket.",
      "This principle explores the automatic response of reciprocating a favor or action tied "
      "to a sense of commitment from a previous situation. An example involves an email "
      "promising a favorable house deal for a recipient actively seeking a house, emphasizing "
      "the urgency of a deposit payment to secure the commitment."};
  return defs[principle_index(p)];
}

// Accepts "P1".."P5" or the long form "P1_Authority" (case-insensitive).
inline std::optional<Principle> parse_principle(std::string_view s) {
  s = text::trim(s);
  constexpr std::array<std::string_view, kPrincipleCount> long_codes = {
      "P1_Authority", "P2_SocialProof", "P3_LikingSimilarityDeception", "P4_Distraction",
      "P5_CommitmentIntegrityReciprocation"};
  for (auto p : kAllPrinciples) {
    if (text::iequals(s, principle_code(p)) || text::iequals(s, long_codes[principle_index(p)])) {
      return p;
    }
  }
  return std::nullopt;
}

}  // namespace smishaug
