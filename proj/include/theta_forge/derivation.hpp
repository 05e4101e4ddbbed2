#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "theta_forge/big_real.hpp"
#include "theta_forge/parameters.hpp"
#include "theta_forge/radical_expr.hpp"
#include "theta_forge/report.hpp"

namespace theta_forge {

enum class StepKind {
  quad4,
  dual,
  gtrms_i,
  gtrms_ii,
  gtrms_iii,
  gtrms_iv,
  transfer_h8,
  transfer_h4,
  transfer_h2,
  transfer_h1,
};

std::string_view step_name(StepKind kind);
StepKind parse_step_kind(std::string_view name);
bool is_transfer(StepKind kind);

/// Index map of a step; throws UsageError when the input family or k does not fit the step.
ParamSpec step_output_spec(StepKind kind, const ParamSpec& input);

/// Positive root of Y^2 = 4XY + 2sqrt2 X + 2sqrt2 X^2 Y + 2X^2 for Y = A_{4,4n} given X = A_{4,n}.
BigReal quad4_step(const BigReal& a_n, const Precision& prec);

/// A_{k,1/n} = 1/A_{k,n}.
BigReal dual_value(const ParamSpec& spec, const BigReal& value, const Precision& prec);

/// A -> A' for the gtrms_* kinds.
BigReal gtrms_transfer(StepKind kind, const BigReal& a, const Precision& prec);

/// A -> h' for the transfer_* kinds, taking the positive real root.
BigReal transfer_to_h_prime(StepKind kind, const BigReal& a, const Precision& prec);

/// Relative residual of the transfer formula as printed, at a given (A, h') pair.
BigReal printed_transfer_residual(StepKind kind, const BigReal& a, const BigReal& h, const Precision& prec);

struct TransferCertificate {
  StepKind kind;
  std::vector<PositiveRational> samples;
  BigReal max_residual;
  BigReal max_printed_residual;
  bool certified = false;
};

/// Checks a transfer against direct evaluation of both parameters at three values of n,
/// and that both parameters share one nome under the index map.
TransferCertificate certify_transfer(StepKind kind, const Precision& prec);

struct ChainSeed {
  ParamSpec spec;
  std::optional<RadicalExpr> expr;
};

struct ChainDescription {
  ChainSeed seed;
  std::vector<StepKind> steps;

  static ChainDescription from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ChainStepResult {
  std::string kind;  // "seed" or a step name
  ParamSpec spec;
  BigReal value;
  BigReal residual;  // relative difference to eval_param(spec)
  std::string branch;
};

inline constexpr int kChainSlack = 10;

/// Runs every step, certifying each value against eval_param within 10^-(d-10).
/// Throws InconsistencyError naming the step index at the first failure.
std::vector<ChainStepResult> run_chain(const ChainDescription& chain, const Precision& prec);

/// Same run, reported step by step; a failing step is reported and ends the list.
std::vector<VerificationReport> chain_reports(const ChainDescription& chain, std::string_view chain_id,
                                              const Precision& prec);

}  // namespace theta_forge
