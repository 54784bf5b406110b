#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "smishaug/smishaug.hpp"

#ifndef SMISHAUG_SOURCE_DIR
#error "SMISHAUG_SOURCE_DIR must point at the source tree"
#endif

namespace smishaug::testkit {

inline std::filesystem::path source_dir() { return SMISHAUG_SOURCE_DIR; }
inline std::filesystem::path data_path(const std::string& rel) { return source_dir() / "data" / rel; }
inline std::filesystem::path test_data(const std::string& rel) { return source_dir() / "tests" / "data" / rel; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "smishaug") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)) + "-" +
             std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
}

// Annotated synthetic corpus: 50 messages (28 smishing, 22 spam) with
// principles resolved from the bundled annotations plus overrides.
inline Corpus annotated_synthetic_corpus() {
  auto corpus = load_corpus(data_path("synthetic_corpus.csv"));
  auto votes = majority_vote(load_annotations(data_path("synthetic_annotations.csv")));
  auto principles = resolve_principles(votes, load_overrides(data_path("synthetic_overrides.csv")));
  return apply_principles(std::move(corpus), principles);
}

// Generated original messages with unique texts. Smishing messages carry a
// link or phone number and a principle assigned round-robin.
inline Corpus generated_corpus(std::size_t smishing, std::size_t spam, std::uint64_t seed = 99) {
  static const char* const subjects[] = {"Your bank", "The tax office", "Your parcel", "Your mobile plan",
                                         "Card services", "Your pension", "The council", "Your energy account"};
  static const char* const verbs[] = {"requires", "is waiting for", "has flagged", "needs", "is pending"};
  static const char* const objects[] = {"a quick verification", "your confirmation", "an address update",
                                        "a payment review", "identity checks", "a security update"};
  static const char* const shops[] = {"Corner Bakery", "MegaMart", "City Cinema", "FitLife Gym", "TechZone",
                                      "Shiny Motors", "Garden World"};
  static const char* const offers[] = {"half price deals", "free delivery", "double points", "30% off",
                                       "a free trial"};
  Rng rng(seed);
  Corpus c;
  for (std::size_t i = 0; i < smishing + spam; ++i) {
    Message m;
    m.id = "g" + text::zero_pad(i + 1, 5);
    const bool smish = i < smishing;
    m.label = smish ? Label::Smishing : Label::Spam;
    if (smish) {
      m.principle = kAllPrinciples[i % kPrincipleCount];
      m.text = std::string(subjects[rng.below(8)]) + " " + verbs[rng.below(5)] + " " + objects[rng.below(6)] +
               " for case " + std::to_string(i + 1) + ". " +
               (i % 3 == 0 ? "Call 0800 555 " + std::to_string(1000 + i) + " today."
                           : "Visit secure-" + std::to_string(i + 1) + ".example within 24 hours.");
    } else {
      m.text = std::string(shops[rng.below(7)]) + " has " + offers[rng.below(5)] + " on item " +
               std::to_string(i + 1) + " this weekend, come and see us.";
    }
    c.messages.push_back(std::move(m));
  }
  return c;
}

}  // namespace smishaug::testkit
