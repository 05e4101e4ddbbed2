#include "theta_forge/verify.hpp"

#include <chrono>

namespace theta_forge {

namespace {

std::int64_t millis_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<VerificationReport> verify_values(const ValueCatalog& catalog, const Precision& prec, Execution exec) {
  const auto& entries = catalog.entries();
  std::vector<VerificationReport> reports(entries.size());
  const long count = static_cast<long>(entries.size());
  if (exec == Execution::serial) {
    for (long i = 0; i < count; ++i) reports[i] = verify_value(entries[i], prec);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) reports[i] = verify_value(entries[i], prec);
  }
  return reports;
}

std::vector<VerificationReport> verify_relations(const RelationCatalog& catalog, const std::vector<BigReal>& q_list,
                                                 const Precision& prec, Execution exec) {
  const auto& relations = catalog.entries();
  const size_t samples = q_list.size();
  const long cells = static_cast<long>(relations.size() * samples);
  std::vector<SampleOutcome> outcomes(static_cast<size_t>(cells));
  std::vector<std::int64_t> cell_ms(static_cast<size_t>(cells), 0);

  auto run_cell = [&](long cell) {
    const auto start = std::chrono::steady_clock::now();
    const size_t r = static_cast<size_t>(cell) / samples;
    const size_t s = static_cast<size_t>(cell) % samples;
    outcomes[cell] = relation_sample(relations[r], q_list[s], prec);
    cell_ms[cell] = millis_since(start);
  };
  if (exec == Execution::serial) {
    for (long cell = 0; cell < cells; ++cell) run_cell(cell);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long cell = 0; cell < cells; ++cell) run_cell(cell);
  }

  std::vector<VerificationReport> reports;
  reports.reserve(relations.size());
  for (size_t r = 0; r < relations.size(); ++r) {
    const auto first = outcomes.begin() + static_cast<long>(r * samples);
    std::vector<SampleOutcome> mine(first, first + static_cast<long>(samples));
    std::int64_t elapsed = 0;
    for (size_t s = 0; s < samples; ++s) elapsed += cell_ms[r * samples + s];
    reports.push_back(summarize_relation(relations[r], q_list, mine, prec, elapsed));
  }
  return reports;
}

}  // namespace theta_forge
