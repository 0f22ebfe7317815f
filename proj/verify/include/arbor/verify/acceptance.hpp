#pragma once

// The eight acceptance criteria as runnable suites. Each returns counts of
// checks and failures, its wall time and its budget.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "arbor/pink.hpp"

namespace arbor::verify {

enum class Profile { quick, full };

/// "quick" or "full"; throws DomainError otherwise.
Profile parse_profile(std::string_view name);
std::string_view profile_name(Profile profile);

struct AcceptanceOptions {
  Profile profile = Profile::quick;
  /// Replace alpha_1 by a corrupted copy (negative control for the whole run).
  bool tamper_generators = false;
  std::uint64_t seed = 20240611;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double seconds = 0;
  double budget_seconds = 0;  // 0: no budget
  std::vector<std::string> notes;

  bool within_budget() const noexcept { return budget_seconds <= 0 || seconds <= budget_seconds; }
  bool pass() const noexcept { return failures == 0 && checks > 0 && within_budget(); }
};

/// Pink generators, with alpha_1 corrupted when `tamper` is set.
GeneratorSet acceptance_generators(int r, int n, bool tamper);

CriterionResult criterion_group_algebra(const AcceptanceOptions& options);
CriterionResult criterion_homomorphism(const AcceptanceOptions& options);
CriterionResult criterion_pink_closure(const AcceptanceOptions& options);
CriterionResult criterion_generator_membership(const AcceptanceOptions& options);
CriterionResult criterion_index(const AcceptanceOptions& options);
CriterionResult criterion_frobenius(const AcceptanceOptions& options);
CriterionResult criterion_square_classes(const AcceptanceOptions& options);
CriterionResult criterion_negative_controls(const AcceptanceOptions& options);

/// Criteria 1..8 in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// One configuration of the Frobenius sweep.
struct FrobeniusConfig {
  std::uint64_t p = 0;
  std::uint64_t c = 0;
  int r = 1;
  std::uint64_t x0 = 0;
  int n = 1;
};

/// The sweep used by criterion 6 for a profile (deterministic in the seed).
std::vector<FrobeniusConfig> frobenius_sweep(Profile profile, std::uint64_t seed);

}  // namespace arbor::verify
