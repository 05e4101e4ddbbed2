#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "theta_forge/parameters.hpp"
#include "theta_forge/radical_expr.hpp"
#include "theta_forge/report.hpp"

namespace theta_forge {

enum class EntryStatus { expected_pass, suspect, candidate };

/// One printed closed-form value tied to the parameter it claims to equal.
///
/// Suspect entries are measured but never fail; a candidate entry is a
/// corrected form registered against a suspect parent and must certify.
struct ValueCatalogEntry {
  std::string id;
  ParamSpec spec;
  RadicalExpr expr;
  std::string citation;
  EntryStatus status = EntryStatus::expected_pass;
  std::string candidate_of;  // parent id, candidates only
  std::string note;
  std::vector<std::string> candidates;  // filled by the catalog for suspect parents
};

/// Residual slack: a value passes when its relative residual is below 10^-(d-10).
inline constexpr int kValueSlack = 10;

/// Line-oriented catalog:
///   id | family k n | expr-text | citation | status [| note]
/// with status one of expected_pass, suspect, candidate(<parent-id>).
/// Blank lines and '#' comments are kept so serialize(parse(text)) == text for
/// canonical files.
class ValueCatalog {
 public:
  static ValueCatalog parse(std::string_view text);
  static ValueCatalog load(const std::string& path);

  std::string serialize() const;

  const std::vector<ValueCatalogEntry>& entries() const { return entries_; }
  const ValueCatalogEntry& at(std::string_view id) const;
  const ValueCatalogEntry* find(std::string_view id) const;

 private:
  struct Comment {
    std::string text;
  };
  struct EntryRef {
    size_t index;
  };

  std::vector<ValueCatalogEntry> entries_;
  std::vector<std::variant<Comment, EntryRef>> lines_;
};

std::string serialize_entry(const ValueCatalogEntry& entry);
ValueCatalogEntry parse_entry(std::string_view line);

/// Certifies eval_param(entry.spec) against eval_expr(entry.expr). Errors are
/// reported as status=error rather than thrown.
VerificationReport verify_value(const ValueCatalogEntry& entry, const Precision& prec);

}  // namespace theta_forge
