#include "theta_forge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "theta_forge/derivation.hpp"
#include "theta_forge/discovery.hpp"
#include "theta_forge/errors.hpp"
#include "theta_forge/parameters.hpp"
#include "theta_forge/theta.hpp"
#include "theta_forge/verify.hpp"

namespace theta_forge {

namespace {

enum class Format { table, json, csv };

struct GlobalOptions {
  std::optional<int> digits;
  bool json = false;
  bool csv = false;
  std::string values_catalog;
  std::string relations_catalog;
};

std::string catalog_dir() {
  if (const char* env = std::getenv("THETA_FORGE_CATALOG_DIR"); env != nullptr && *env != '\0') return env;
  return THETA_FORGE_DEFAULT_CATALOG_DIR;
}

Precision resolve_precision(const GlobalOptions& opts) {
  if (opts.digits) return Precision(*opts.digits);
  if (const char* env = std::getenv("THETA_FORGE_DIGITS"); env != nullptr && *env != '\0') {
    try {
      size_t used = 0;
      const int d = std::stoi(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return Precision(d);
    } catch (const std::logic_error&) {
      throw UsageError(std::string("THETA_FORGE_DIGITS is not an integer: ") + env);
    }
  }
  return Precision(50);
}

Format resolve_format(const GlobalOptions& opts) {
  if (opts.json && opts.csv) throw UsageError("--json and --csv are mutually exclusive");
  if (opts.json) return Format::json;
  if (opts.csv) return Format::csv;
  return Format::table;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::ordered_json read_json_file(const std::string& path) {
  try {
    return nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

ValueCatalog load_values(const GlobalOptions& opts) {
  return ValueCatalog::load(opts.values_catalog.empty() ? catalog_dir() + "/values.catalog" : opts.values_catalog);
}

RelationCatalog load_relations(const GlobalOptions& opts) {
  return RelationCatalog::load(opts.relations_catalog.empty() ? catalog_dir() + "/relations.catalog"
                                                              : opts.relations_catalog);
}

void emit(const std::vector<VerificationReport>& reports, Format format, std::ostream& out) {
  switch (format) {
    case Format::json:
      for (const auto& r : reports) out << r.to_json().dump() << '\n';
      break;
    case Format::csv:
      out << csv_header() << '\n';
      for (const auto& r : reports) out << to_csv_row(r) << '\n';
      break;
    case Format::table:
      out << to_table(reports);
      break;
  }
}

int exit_for(const std::vector<VerificationReport>& reports) {
  return has_failures(reports) ? kExitVerificationFailure : kExitOk;
}

std::vector<BigReal> parse_nomes(const std::vector<std::string>& texts, mpfr_prec_t bits) {
  std::vector<BigReal> out;
  for (const auto& t : texts) {
    BigReal q = BigReal::from_string(t, bits);
    if (!(q.sign() > 0) || !(q < BigReal(1, bits))) throw UsageError("sample nome must lie in (0, 1): " + t);
    out.push_back(std::move(q));
  }
  return out;
}

VerificationReport transfer_report(StepKind kind, const Precision& prec) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.id = std::string(step_name(kind));
  rep.kind = ReportKind::derivation;
  rep.digits = prec.digits;
  const TransferCertificate cert = certify_transfer(kind, prec);
  rep.residual = format_residual(cert.max_residual);
  rep.status = cert.certified ? ReportStatus::pass : ReportStatus::fail;
  std::string ns;
  for (const auto& n : cert.samples) ns += (ns.empty() ? "" : ",") + n.to_string();
  rep.note = "re-derived transfer against direct evaluation at n=" + ns + "; threshold 1e-" +
             std::to_string(prec.digits - kChainSlack) + "; printed formula residual " +
             format_residual(cert.max_printed_residual);
  rep.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---- subcommands ----------------------------------------------------------

int cmd_eval(const GlobalOptions& opts, const std::vector<std::string>& spec_parts, const std::string& q_text,
             std::ostream& out) {
  const Precision prec = resolve_precision(opts);
  const Format format = resolve_format(opts);
  if (spec_parts.empty()) throw UsageError("eval needs a parameter, e.g. `eval A 4 2` or `eval h16 --q 0.1`");

  std::string label;
  BigReal value;
  const std::string& head = spec_parts.front();
  static const char* const kNomeFunctions[] = {"h16", "phi", "psi", "fneg", "alpha", "z"};
  const bool nome_function =
      std::find(std::begin(kNomeFunctions), std::end(kNomeFunctions), head) != std::end(kNomeFunctions);
  if (nome_function) {
    if (spec_parts.size() != 1) throw UsageError(head + " takes its argument through --q");
    if (q_text.empty()) throw UsageError(head + " needs --q");
    const BigReal q = BigReal::from_string(q_text, prec.bits());
    label = head + "(" + q_text + ")";
    if (head == "h16") {
      value = h16(Nome::raw(q, prec), prec);
    } else if (head == "phi") {
      value = phi(q, prec);
    } else if (head == "psi") {
      value = psi(q, prec);
    } else if (head == "fneg") {
      value = f_neg(q, prec);
    } else if (head == "alpha") {
      value = alpha_of_q(q, prec);
    } else {
      value = z_of_q(q, prec);
    }
  } else {
    if (!q_text.empty()) throw UsageError("--q only applies to h16, phi, psi, fneg, alpha and z");
    std::string joined;
    for (const auto& p : spec_parts) joined += (joined.empty() ? "" : " ") + p;
    const ParamSpec spec = ParamSpec::parse(joined);
    label = spec.to_string();
    value = eval_param(spec, prec);
  }

  const std::string text = value.to_decimal(prec.digits);
  switch (format) {
    case Format::json: {
      nlohmann::ordered_json j;
      j["spec"] = label;
      j["value"] = text;
      j["digits"] = prec.digits;
      out << j.dump() << '\n';
      break;
    }
    case Format::csv:
      out << "spec,value,digits\n" << label << ',' << text << ',' << prec.digits << '\n';
      break;
    case Format::table:
      out << label << " = " << text << '\n';
      break;
  }
  return kExitOk;
}

int cmd_verify(const GlobalOptions& opts, const std::string& scope, const std::vector<std::string>& sample_texts,
               bool serial, std::ostream& out) {
  const Precision prec = resolve_precision(opts);
  const Format format = resolve_format(opts);
  const Execution exec = serial ? Execution::serial : Execution::parallel;
  const std::vector<BigReal> samples =
      sample_texts.empty() ? default_relation_samples(prec.bits()) : parse_nomes(sample_texts, prec.bits());

  std::vector<VerificationReport> reports;
  if (scope == "values" || scope == "all") {
    reports = verify_values(load_values(opts), prec, exec);
  }
  if (scope == "relations" || scope == "all") {
    auto rel = verify_relations(load_relations(opts), samples, prec, exec);
    reports.insert(reports.end(), rel.begin(), rel.end());
  }
  if (scope != "values" && scope != "relations" && scope != "all") {
    const ValueCatalog values = load_values(opts);
    const RelationCatalog relations = load_relations(opts);
    if (const auto* entry = values.find(scope)) {
      reports.push_back(verify_value(*entry, prec));
    } else if (const auto* rel = relations.find(scope)) {
      reports.push_back(verify_relation(*rel, samples, prec));
    } else {
      std::optional<StepKind> kind;
      try {
        kind = parse_step_kind(scope);
      } catch (const UsageError&) {
      }
      if (!kind || !is_transfer(*kind)) {
        throw UsageError("unknown id '" + scope + "': not a value entry, relation or transfer");
      }
      reports.push_back(transfer_report(*kind, prec));
    }
  }
  emit(reports, format, out);
  return exit_for(reports);
}

int cmd_derive(const GlobalOptions& opts, const std::string& path, const std::string& chain_id, std::ostream& out) {
  const Precision prec = resolve_precision(opts);
  const Format format = resolve_format(opts);
  const nlohmann::ordered_json doc = read_json_file(path);

  std::vector<std::pair<std::string, ChainDescription>> chains;
  if (doc.is_array()) {
    const std::string id = chain_id.empty() ? std::filesystem::path(path).stem().string() : chain_id;
    chains.emplace_back(id, ChainDescription::from_json(nlohmann::json::parse(doc.dump())));
  } else if (doc.is_object()) {
    for (const auto& [id, steps] : doc.items()) {
      if (!chain_id.empty() && id != chain_id) continue;
      chains.emplace_back(id, ChainDescription::from_json(nlohmann::json::parse(steps.dump())));
    }
    if (chains.empty()) throw UsageError("no chain named '" + chain_id + "' in " + path);
  } else {
    throw UsageError(path + ": chain file must hold an array of steps or an object of named chains");
  }

  std::vector<std::vector<VerificationReport>> per_chain(chains.size());
  std::vector<std::exception_ptr> failures(chains.size());
  const long count = static_cast<long>(chains.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      per_chain[i] = chain_reports(chains[i].second, chains[i].first, prec);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  std::vector<VerificationReport> reports;
  for (auto& r : per_chain) reports.insert(reports.end(), r.begin(), r.end());
  emit(reports, format, out);
  return exit_for(reports);
}

int cmd_discover(const GlobalOptions& opts, const std::string& path, int sample_count, int bound,
                 std::ostream& out) {
  const Precision prec = resolve_precision(opts);
  const Format format = resolve_format(opts);
  const MonomialBasis basis = MonomialBasis::from_json(nlohmann::json::parse(read_json_file(path).dump()));
  const size_t count =
      sample_count > 0 ? static_cast<size_t>(sample_count) : basis.monomials.size() + 8;

  const auto start = std::chrono::steady_clock::now();
  const DiscoveryOutcome outcome =
      discover_relation(basis, default_discovery_samples(count, prec.bits()), prec, bound);
  VerificationReport rep;
  rep.id = std::filesystem::path(path).stem().string();
  rep.kind = ReportKind::discovery;
  rep.digits = outcome.digits_used;
  if (outcome.relation) {
    rep.status = ReportStatus::pass;
    rep.residual = format_residual(outcome.held_out_residual);
    rep.note = serialize_relation(*outcome.relation) + "; threshold 1e-" +
               std::to_string(outcome.digits_used - 15) + "; " + outcome.note;
  } else {
    rep.status = ReportStatus::fail;
    rep.note = "no relation with coefficients of height <= " + std::to_string(bound) + "; " + outcome.note;
  }
  rep.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  emit({rep}, format, out);
  return exit_for({rep});
}

int cmd_report(const GlobalOptions& opts, const std::string& path, std::ostream& out) {
  const Format format = resolve_format(opts);
  std::vector<VerificationReport> reports;
  std::istringstream lines(read_file(path));
  std::string line;
  size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      reports.push_back(VerificationReport::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  emit(reports, format, out);
  return exit_for(reports);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arbitrary-precision theta function and modular equation verifier", "theta_forge"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--digits,-d", opts.digits, "Decimal digits to certify (default 50, env THETA_FORGE_DIGITS)");
  app.add_flag("--json", opts.json, "One JSON object per line");
  app.add_flag("--csv", opts.csv, "Comma separated values");
  app.add_option("--values-catalog", opts.values_catalog, "Closed-form value catalog file");
  app.add_option("--relations-catalog", opts.relations_catalog, "Relation catalog file");

  std::vector<std::string> spec_parts;
  std::string q_text;
  auto* eval = app.add_subcommand("eval", "Evaluate a parameter (e.g. `A 4 2`) or a function of a nome");
  eval->add_option("spec", spec_parts, "Family and indices, or h16/phi/psi/fneg/alpha/z")->required();
  eval->add_option("--q", q_text, "Nome for h16, phi, psi, fneg, alpha, z");

  std::string scope;
  std::vector<std::string> sample_texts;
  bool serial = false;
  auto* verify = app.add_subcommand("verify", "Certify catalog entries: values, relations, all, or one id");
  verify->add_option("scope", scope, "values | relations | all | <id>")->required();
  verify->add_option("--samples", sample_texts, "Relation sample nomes (comma separated)")->delimiter(',');
  verify->add_flag("--serial", serial, "Use the serial reference path");

  std::string chain_path;
  std::string chain_id;
  auto* derive = app.add_subcommand("derive", "Run derivation chains from a JSON file");
  derive->add_option("chain-file", chain_path, "Chain JSON file")->required();
  derive->add_option("--id", chain_id, "Chain name (default: file stem, or all chains in the file)");

  std::string basis_path;
  int sample_count = 0;
  int bound = 32;
  auto* discover = app.add_subcommand("discover", "Search a monomial basis for a Z[sqrt2] relation");
  discover->add_option("basis-file", basis_path, "Basis JSON file")->required();
  discover->add_option("--samples", sample_count, "Number of sample nomes (default basis size + 8)");
  discover->add_option("--bound", bound, "Coefficient height bound for a + b sqrt2")->capture_default_str();

  std::string report_path;
  auto* report = app.add_subcommand("report", "Re-render a JSON-lines report stream");
  report->add_option("file", report_path, "JSON-lines file, or - for stdin")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(opts, spec_parts, q_text, out);
    if (verify->parsed()) return cmd_verify(opts, scope, sample_texts, serial, out);
    if (derive->parsed()) return cmd_derive(opts, chain_path, chain_id, out);
    if (discover->parsed()) return cmd_discover(opts, basis_path, sample_count, bound, out);
    if (report->parsed()) return cmd_report(opts, report_path, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PrecisionUnreachable& e) {
    err << "precision unreachable: " << e.what() << '\n';
    return kExitPrecisionUnreachable;
  } catch (const IllConditioned& e) {
    err << "ill-conditioned: " << e.what() << '\n';
    return kExitPrecisionUnreachable;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailure;
  }
  return kExitUsage;
}

}  // namespace theta_forge
