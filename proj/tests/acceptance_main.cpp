// Runs every acceptance criterion and prints one line per criterion.
// Exit status is the number of failed criteria (capped at 100).

#include <iostream>
#include <string>

#include "freemult/verify.hpp"

int main(int argc, char** argv) {
  using namespace freemult::verify;
  const std::string suite = argc > 1 ? argv[1] : "all";
  const auto ids = suite_criteria(suite);
  if (ids.empty()) {
    std::cerr << "unknown suite '" << suite << "'\n";
    return 2;
  }
  int failed = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id);
    std::cout << format_line(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed > 100 ? 100 : failed;
}
