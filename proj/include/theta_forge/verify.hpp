#pragma once

#include <vector>

#include "theta_forge/relations.hpp"
#include "theta_forge/report.hpp"
#include "theta_forge/value_catalog.hpp"

namespace theta_forge {

/// How a catalog sweep is scheduled. Both paths produce identical reports
/// (apart from elapsed_ms) in catalog order.
enum class Execution { serial, parallel };

std::vector<VerificationReport> verify_values(const ValueCatalog& catalog, const Precision& prec,
                                              Execution exec = Execution::parallel);

/// Fans out over every (relation, sample nome) pair, then folds the samples of
/// each relation into one report.
std::vector<VerificationReport> verify_relations(const RelationCatalog& catalog, const std::vector<BigReal>& q_list,
                                                 const Precision& prec, Execution exec = Execution::parallel);

}  // namespace theta_forge
