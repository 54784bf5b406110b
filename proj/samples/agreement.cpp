// Majority vote and Fleiss' kappa over a tiny annotation set.
#include <iostream>

#include "smishaug/taxonomy.hpp"

int main() {
  using namespace smishaug;
  std::vector<AnnotationRecord> records;
  auto add = [&](const char* id, std::initializer_list<Principle> votes) {
    int a = 0;
    for (auto p : votes) records.push_back({id, "a" + std::to_string(++a), p});
  };
  using P = Principle;
  add("m1", {P::Authority, P::Authority, P::Authority, P::Distraction, P::Distraction});
  add("m2", {P::Authority, P::SocialProof, P::LikingSimilarityDeception, P::Distraction,
             P::CommitmentIntegrityReciprocation});
  add("m3", {P::Distraction, P::Distraction, P::Distraction, P::Distraction, P::Distraction});
  for (const auto& r : majority_vote(records)) {
    std::cout << r.message_id << ": " << (r.decided ? principle_name(*r.decided) : "unresolved") << "\n";
  }
  std::cout << "kappa " << fleiss_kappa(records) << "\n";
}
