#include "theta_forge/derivation.hpp"

#include <chrono>
#include <map>

#include "theta_forge/errors.hpp"

namespace theta_forge {

namespace {

constexpr std::pair<StepKind, std::string_view> kStepNames[] = {
    {StepKind::quad4, "quad4"},
    {StepKind::dual, "dual"},
    {StepKind::gtrms_i, "gtrms_i"},
    {StepKind::gtrms_ii, "gtrms_ii"},
    {StepKind::gtrms_iii, "gtrms_iii"},
    {StepKind::gtrms_iv, "gtrms_iv"},
    {StepKind::transfer_h8, "transfer_h8"},
    {StepKind::transfer_h4, "transfer_h4"},
    {StepKind::transfer_h2, "transfer_h2"},
    {StepKind::transfer_h1, "transfer_h1"},
};

// The A_{k,n} index k each A-consuming step expects.
PositiveRational expected_k(StepKind kind) {
  switch (kind) {
    case StepKind::quad4:
    case StepKind::gtrms_i:
    case StepKind::transfer_h8:
      return {4, 1};
    case StepKind::gtrms_ii:
    case StepKind::transfer_h4:
      return {2, 1};
    case StepKind::gtrms_iii:
    case StepKind::transfer_h2:
      return {1, 1};
    case StepKind::gtrms_iv:
    case StepKind::transfer_h1:
      return {1, 2};
    case StepKind::dual:
      break;
  }
  return {1, 1};
}

BigReal sqrt2(mpfr_prec_t bits) { return sqrt(BigReal(2, bits)); }

void require_positive(const BigReal& x, std::string_view what) {
  if (!(x > 0)) throw DomainError(std::string(what) + " needs a positive input");
}

std::string branch_note(StepKind kind) {
  switch (kind) {
    case StepKind::quad4:
      return "positive root of the quadratic (the other root is negative)";
    case StepKind::dual:
      return "reciprocal";
    case StepKind::gtrms_i:
    case StepKind::gtrms_ii:
    case StepKind::gtrms_iii:
      return "direct formula, positive roots";
    case StepKind::gtrms_iv:
      return "positive root x=(A^4+sqrt(A^8+1))/2 of the quadratic in A'^4";
    default:
      return "positive real root";
  }
}

BigReal relative_residual(const BigReal& value, const BigReal& reference) {
  BigReal diff = abs(value - reference);
  if (!reference.is_zero()) diff /= abs(reference);
  return diff;
}

}  // namespace

std::string_view step_name(StepKind kind) {
  for (const auto& [k, name] : kStepNames) {
    if (k == kind) return name;
  }
  return "?";
}

StepKind parse_step_kind(std::string_view name) {
  for (const auto& [k, n] : kStepNames) {
    if (n == name) return k;
  }
  throw UsageError("unknown derivation step '" + std::string(name) + "'");
}

bool is_transfer(StepKind kind) {
  return kind == StepKind::transfer_h8 || kind == StepKind::transfer_h4 || kind == StepKind::transfer_h2 ||
         kind == StepKind::transfer_h1;
}

ParamSpec step_output_spec(StepKind kind, const ParamSpec& input) {
  const std::string label = std::string(step_name(kind)) + " applied to " + input.to_string();
  if (input.family != Family::A) throw UsageError(label + ": step needs an A_{k,n} input");
  if (kind == StepKind::dual) return {Family::A, input.k, input.n.reciprocal()};
  if (!(input.k == expected_k(kind))) {
    throw UsageError(label + ": step needs k=" + expected_k(kind).to_string());
  }
  switch (kind) {
    case StepKind::quad4:
      return {Family::A, input.k, input.n * PositiveRational(4)};
    case StepKind::gtrms_i:
    case StepKind::gtrms_ii:
    case StepKind::gtrms_iii:
    case StepKind::gtrms_iv:
      return {Family::A_prime, input.k, input.n};
    case StepKind::transfer_h8:
      return {Family::h_prime, PositiveRational(2), input.n / PositiveRational(8)};
    case StepKind::transfer_h4:
      return {Family::h_prime, PositiveRational(2), input.n / PositiveRational(4)};
    case StepKind::transfer_h2:
      return {Family::h_prime, PositiveRational(2), input.n / PositiveRational(2)};
    case StepKind::transfer_h1:
      return {Family::h_prime, PositiveRational(2), input.n};
    case StepKind::dual:
      break;
  }
  throw UsageError(label);
}

BigReal quad4_step(const BigReal& a_n, const Precision& prec) {
  require_positive(a_n, "quad4");
  const mpfr_prec_t bits = prec.bits();
  const BigReal r2 = sqrt2(bits);
  const BigReal x = a_n.rounded_to(bits);
  const BigReal b = 4 * x + 2 * r2 * x * x;
  const BigReal c = 2 * r2 * x + 2 * x * x;
  const BigReal disc = b * b + 4 * c;
  if (!(disc > 0)) throw InconsistencyError("quad4: nonpositive discriminant");
  return (b + sqrt(disc)) / 2;
}

BigReal dual_value(const ParamSpec& spec, const BigReal& value, const Precision& prec) {
  if (spec.family != Family::A) throw UsageError("dual applies to the A family only");
  require_positive(value, "dual");
  return BigReal(1, prec.bits()) / value.rounded_to(prec.bits());
}

BigReal gtrms_transfer(StepKind kind, const BigReal& a, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = a.rounded_to(bits);
  if (x.sign() < 0) throw DomainError("gtrms transfer needs a nonnegative input");
  const BigReal r2 = sqrt2(bits);
  switch (kind) {
    case StepKind::gtrms_i:
      return x + r2;
    case StepKind::gtrms_ii:
      return sqrt(x * x + r2);
    case StepKind::gtrms_iii:
      return root(pow(x, 4) + 1, 4);
    case StepKind::gtrms_iv: {
      const BigReal a4 = pow(x, 4);
      return root((a4 + sqrt(a4 * a4 + 1)) / 2, 4);
    }
    default:
      throw UsageError(std::string(step_name(kind)) + " is not a gtrms step");
  }
}

BigReal transfer_to_h_prime(StepKind kind, const BigReal& a, const Precision& prec) {
  require_positive(a, step_name(kind));
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = a.rounded_to(bits);
  const BigReal r2 = sqrt2(bits);
  switch (kind) {
    case StepKind::transfer_h8:
      return sqrt(r2 * x / (2 * (x + r2)));
    case StepKind::transfer_h4: {
      const BigReal a2 = x * x;
      return root(a2 / (2 * a2 + 2 * r2), 4);
    }
    case StepKind::transfer_h2: {
      const BigReal a4 = pow(x, 4);
      return root(a4 / (4 * (a4 + 1)), 8);
    }
    case StepKind::transfer_h1: {
      const BigReal a8 = pow(x, 8);
      return root(a8 / (2 * (sqrt(a8 * a8 + a8) + a8)), 8);
    }
    default:
      throw UsageError(std::string(step_name(kind)) + " is not a transfer to h'");
  }
}

BigReal printed_transfer_residual(StepKind kind, const BigReal& a, const BigReal& h, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal r2 = sqrt2(bits);
  std::vector<BigReal> terms;
  switch (kind) {
    case StepKind::transfer_h8:  // sqrt2 A + 2h^2 = A
      terms = {r2 * a, 2 * h * h, -a};
      break;
    case StepKind::transfer_h4:  // 2A^2h^4 + 2sqrt2 h^4 = A^2
      terms = {2 * a * a * pow(h, 4), 2 * r2 * pow(h, 4), -(a * a)};
      break;
    case StepKind::transfer_h2:  // 4(A^4+1)h^8 = A^4
      terms = {4 * pow(a, 4) * pow(h, 8), 4 * pow(h, 8), -pow(a, 4)};
      break;
    case StepKind::transfer_h1:  // (4h^8-1)A^8 + 4h^16 = 0
      terms = {4 * pow(h, 8) * pow(a, 8), -pow(a, 8), 4 * pow(h, 16)};
      break;
    default:
      throw UsageError(std::string(step_name(kind)) + " is not a transfer to h'");
  }
  BigReal sum(0, bits);
  BigReal largest(0, bits);
  for (const auto& t : terms) {
    sum += t;
    if (abs(t) > largest) largest = abs(t);
  }
  return largest.is_zero() ? largest : abs(sum) / largest;
}

TransferCertificate certify_transfer(StepKind kind, const Precision& prec) {
  if (!is_transfer(kind)) throw UsageError(std::string(step_name(kind)) + " is not a transfer to h'");
  const mpfr_prec_t bits = prec.bits();
  TransferCertificate cert{kind, {PositiveRational(1), PositiveRational(2), PositiveRational(3)},
                           BigReal(0, bits), BigReal(0, bits)};
  const BigReal threshold = pass_threshold(prec.digits, kChainSlack, bits);
  bool ok = true;
  for (const auto& n : cert.samples) {
    const ParamSpec in{Family::A, expected_k(kind), n};
    const ParamSpec out = step_output_spec(kind, in);
    const BigReal nome_gap = relative_residual(nome_for(out, prec).value(), nome_for(in, prec).value());
    if (!(nome_gap < threshold)) {
      throw InconsistencyError(std::string(step_name(kind)) + ": " + in.to_string() + " and " + out.to_string() +
                               " do not share a nome");
    }
    const BigReal a = eval_param(in, prec);
    const BigReal h_direct = eval_param(out, prec);
    const BigReal r = relative_residual(transfer_to_h_prime(kind, a, prec), h_direct);
    const BigReal printed = printed_transfer_residual(kind, a, h_direct, prec);
    if (r > cert.max_residual) cert.max_residual = r;
    if (printed > cert.max_printed_residual) cert.max_printed_residual = printed;
    ok = ok && r < threshold;
  }
  cert.certified = ok;
  return cert;
}

ChainDescription ChainDescription::from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("chain must be a nonempty JSON array");
  const auto text_of = [](const nlohmann::json& v, const char* key) -> std::string {
    if (!v.contains(key)) throw UsageError(std::string("chain seed params missing '") + key + "'");
    const auto& x = v.at(key);
    if (x.is_string()) return x.get<std::string>();
    if (x.is_number_integer()) return std::to_string(x.get<long long>());
    throw UsageError(std::string("chain seed '") + key + "' must be a string or integer");
  };
  ChainDescription chain;
  const auto& seed = j.front();
  if (!seed.is_object() || seed.value("kind", "") != "seed" || !seed.contains("params") ||
      !seed.at("params").is_object()) {
    throw UsageError("chain must start with {\"kind\":\"seed\",\"params\":{...}}");
  }
  const auto& params = seed.at("params");
  chain.seed.spec = {parse_family(text_of(params, "family")), PositiveRational::parse(text_of(params, "k")),
                     PositiveRational::parse(text_of(params, "n"))};
  if (params.contains("expr")) chain.seed.expr = parse_expr(text_of(params, "expr"));
  for (size_t i = 1; i < j.size(); ++i) {
    if (!j[i].is_object() || !j[i].contains("kind") || !j[i].at("kind").is_string()) {
      throw UsageError("chain step " + std::to_string(i) + " needs a string \"kind\"");
    }
    chain.steps.push_back(parse_step_kind(j[i].at("kind").get<std::string>()));
  }
  return chain;
}

nlohmann::json ChainDescription::to_json() const {
  nlohmann::ordered_json params = {{"family", std::string(family_name(seed.spec.family))},
                                   {"k", seed.spec.k.to_string()},
                                   {"n", seed.spec.n.to_string()}};
  if (seed.expr) params["expr"] = print_expr(*seed.expr);
  nlohmann::json out = nlohmann::json::array();
  out.push_back({{"kind", "seed"}, {"params", params}});
  for (auto k : steps) out.push_back({{"kind", std::string(step_name(k))}});
  return out;
}

namespace {

struct ChainRun {
  std::vector<ChainStepResult> results;
  std::optional<std::string> failure;
  std::map<StepKind, std::string> transfer_notes;
};

ChainRun execute_chain(const ChainDescription& chain, const Precision& prec) {
  ChainRun run;
  const mpfr_prec_t bits = prec.bits();
  const BigReal threshold = pass_threshold(prec.digits, kChainSlack, bits);

  ChainStepResult seed{"seed", chain.seed.spec, BigReal(0, bits), BigReal(0, bits), "direct evaluation"};
  const BigReal direct_seed = eval_param(chain.seed.spec, prec);
  if (chain.seed.expr) {
    seed.value = eval_expr(*chain.seed.expr, prec);
    seed.residual = relative_residual(seed.value, direct_seed);
    seed.branch = "closed form " + print_expr(*chain.seed.expr);
  } else {
    seed.value = direct_seed;
  }
  run.results.push_back(seed);
  if (!(seed.residual < threshold)) {
    run.failure = "step 0 (seed " + seed.spec.to_string() + "): closed form differs from direct evaluation by " +
                  format_residual(seed.residual);
    return run;
  }

  for (size_t i = 0; i < chain.steps.size(); ++i) {
    const StepKind kind = chain.steps[i];
    const ChainStepResult& prev = run.results.back();
    const std::string where = "step " + std::to_string(i + 1) + " (" + std::string(step_name(kind)) + ")";
    ParamSpec out;
    try {
      out = step_output_spec(kind, prev.spec);
    } catch (const UsageError& err) {
      throw UsageError(where + ": " + err.what());
    }
    ChainStepResult res{std::string(step_name(kind)), out, BigReal(0, bits), BigReal(0, bits), branch_note(kind)};
    if (is_transfer(kind)) {
      if (!run.transfer_notes.count(kind)) {
        const TransferCertificate cert = certify_transfer(kind, prec);
        if (!cert.certified) {
          throw InconsistencyError(where + ": transfer fails direct certification, residual " +
                                   format_residual(cert.max_residual));
        }
        run.transfer_notes[kind] = "transfer certified at n=1,2,3 to " + format_residual(cert.max_residual) +
                                   "; printed formula worst residual " + format_residual(cert.max_printed_residual);
      }
      res.value = transfer_to_h_prime(kind, prev.value, prec);
      res.branch += "; " + run.transfer_notes[kind] + "; printed formula residual at this input " +
                    format_residual(printed_transfer_residual(kind, prev.value, res.value, prec));
    } else if (kind == StepKind::quad4) {
      res.value = quad4_step(prev.value, prec);
      res.branch += res.value > 1 ? "; root > 1" : "; root <= 1";
    } else if (kind == StepKind::dual) {
      res.value = dual_value(prev.spec, prev.value, prec);
    } else {
      res.value = gtrms_transfer(kind, prev.value, prec);
    }
    res.residual = relative_residual(res.value, eval_param(out, prec));
    run.results.push_back(res);
    if (!(res.residual < threshold)) {
      run.failure = where + ": " + out.to_string() + " differs from direct evaluation by " +
                    format_residual(res.residual);
      return run;
    }
  }
  return run;
}

}  // namespace

std::vector<ChainStepResult> run_chain(const ChainDescription& chain, const Precision& prec) {
  ChainRun run = execute_chain(chain, prec);
  if (run.failure) throw InconsistencyError(*run.failure);
  return std::move(run.results);
}

std::vector<VerificationReport> chain_reports(const ChainDescription& chain, std::string_view chain_id,
                                              const Precision& prec) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<VerificationReport> reports;
  const std::string threshold_text = "threshold 1e-" + std::to_string(prec.digits - kChainSlack);
  try {
    ChainRun run = execute_chain(chain, prec);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    for (size_t i = 0; i < run.results.size(); ++i) {
      const auto& r = run.results[i];
      VerificationReport rep;
      rep.id = std::string(chain_id) + "." + std::to_string(i) + "." + r.kind;
      rep.kind = ReportKind::derivation;
      rep.digits = prec.digits;
      rep.residual = format_residual(r.residual);
      const bool failed = run.failure && i + 1 == run.results.size();
      rep.status = failed ? ReportStatus::fail : ReportStatus::pass;
      rep.note = r.spec.to_string() + " = " + r.value.to_decimal(prec.digits) + "; " + r.branch + "; " +
                 threshold_text;
      if (failed) rep.note += "; " + *run.failure;
      rep.elapsed_ms = i + 1 == run.results.size() ? elapsed : 0;
      reports.push_back(std::move(rep));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& err) {
    VerificationReport rep;
    rep.id = std::string(chain_id) + "." + std::to_string(reports.size());
    rep.kind = ReportKind::derivation;
    rep.status = ReportStatus::error;
    rep.digits = prec.digits;
    rep.note = err.what();
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace theta_forge
