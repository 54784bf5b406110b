// Prints one variant per EDA technique for a message given on the command line.
#include <iostream>

#include "smishaug/eda.hpp"

int main(int argc, char** argv) {
  using namespace smishaug;
  const std::string msg = argc > 1 ? argv[1]
                                   : "Your bank account has been locked. Verify your details at "
                                     "secure-bank.example within 24 hours to avoid closure.";
  eda::EdaParams params;
  params.seed = 7;
  for (auto t : {eda::Technique::SR, eda::Technique::RI, eda::Technique::RS, eda::Technique::RD}) {
    auto r = eda::apply(t, msg, eda::SynonymLexicon::builtin(), params);
    std::cout << eda::technique_name(t) << ": " << r.text << "\n";
  }
}
