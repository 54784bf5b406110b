// Renders a theory-guided smishing prompt from a handful of labeled demos.
#include <iostream>

#include "smishaug/promptgen.hpp"

int main() {
  using namespace smishaug;
  std::vector<Message> pool;
  const char* texts[] = {
      "IRS notice: your refund is on hold. Confirm your SSN at irs-refund.example today.",
      "Police department: an unpaid fine is registered to your plate. Pay at fines-gov.example.",
      "Your tax office requires KYC update. Call 0800 555 0199 before midnight.",
  };
  int i = 0;
  for (const char* t : texts) {
    Message m;
    m.id = "demo" + std::to_string(++i);
    m.text = t;
    m.label = Label::Smishing;
    m.principle = Principle::Authority;
    pool.push_back(m);
  }
  Rng rng(1);
  auto sample = sample_demos(pool, Principle::Authority, 5, rng);
  auto bundle = build_prompt(Label::Smishing, Principle::Authority, sample.demos, 10, PromptTemplateSet::defaults());
  std::cout << bundle.rendered << "\n\n(prompt_id " << bundle.prompt_id << ", demos drawn with replacement: "
            << (sample.with_replacement ? "yes" : "no") << ")\n";
}
