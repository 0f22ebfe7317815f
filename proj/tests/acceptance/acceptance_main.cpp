// Runs acceptance criteria 1..8 and prints one PASS/FAIL line per criterion.
//
//   arbor_acceptance [--profile quick|full] [--seed N] [--only ID] [--verbose]

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>

#include "arbor/verify/acceptance.hpp"

namespace {

void print(const arbor::verify::CriterionResult& r, bool verbose) {
  std::printf("[%s] criterion %d: %s (%zu checks, %zu failures, %.2f s", r.pass() ? "PASS" : "FAIL", r.id,
              r.title.c_str(), r.checks, r.failures, r.seconds);
  if (r.budget_seconds > 0) std::printf(" / budget %.0f s", r.budget_seconds);
  std::printf(")\n");
  for (const auto& note : r.notes) {
    if (verbose || note.rfind("FAIL", 0) == 0) std::printf("    %s\n", note.c_str());
  }
  if (!r.within_budget()) std::printf("    FAIL over time budget\n");
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace arbor::verify;
  AcceptanceOptions options;
  int only = 0;
  bool verbose = false;
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string_view arg = argv[i];
      auto value = [&]() -> std::string {
        if (i + 1 >= argc) throw std::invalid_argument(std::string(arg) + " needs a value");
        return argv[++i];
      };
      if (arg == "--profile") {
        options.profile = parse_profile(value());
      } else if (arg == "--seed") {
        options.seed = std::stoull(value());
      } else if (arg == "--only") {
        only = std::stoi(value());
      } else if (arg == "--verbose") {
        verbose = true;
      } else {
        throw std::invalid_argument("unknown argument " + std::string(arg));
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "arbor_acceptance: %s\n", e.what());
    return 2;
  }

  using Runner = CriterionResult (*)(const AcceptanceOptions&);
  const Runner runners[] = {criterion_group_algebra, criterion_homomorphism, criterion_pink_closure,
                            criterion_generator_membership, criterion_index, criterion_frobenius,
                            criterion_square_classes, criterion_negative_controls};
  std::printf("acceptance profile %s, seed %llu\n", std::string(profile_name(options.profile)).c_str(),
              static_cast<unsigned long long>(options.seed));
  int failed = 0;
  for (int id = 1; id <= 8; ++id) {
    if (only != 0 && only != id) continue;
    const auto result = runners[id - 1](options);
    print(result, verbose);
    if (!result.pass()) ++failed;
  }
  std::printf("%s: %d criteria failed\n", failed == 0 ? "ALL PASS" : "FAILED", failed);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
