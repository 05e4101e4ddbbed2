#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "theta_forge/big_real.hpp"

namespace theta_forge {

enum class ReportKind { value, relation, derivation, discovery };
enum class ReportStatus { pass, fail, suspect, error };

std::string_view to_string(ReportKind kind);
std::string_view to_string(ReportStatus status);
ReportKind parse_report_kind(std::string_view text);
ReportStatus parse_report_status(std::string_view text);

/// Outcome of one certification. The residual travels as a decimal string so
/// reports serialize without a binary-float round trip.
struct VerificationReport {
  std::string id;
  ReportKind kind = ReportKind::value;
  ReportStatus status = ReportStatus::error;
  std::string residual = "nan";
  int digits = 0;
  std::int64_t elapsed_ms = 0;
  std::string note;

  nlohmann::ordered_json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Significant digits used when a residual is rendered into a report.
inline constexpr int kResidualDigits = 6;

std::string format_residual(const BigReal& residual);
/// Parses a report residual back into a number (for comparisons in tests and
/// summaries); "nan" maps to NaN.
BigReal parse_residual(const std::string& text);

/// 10^-(digits - slack), the pass threshold for residual certification.
BigReal pass_threshold(int digits, int slack, mpfr_prec_t bits);

std::string csv_header();
std::string to_csv_row(const VerificationReport& report);
/// Aligned human-readable table, one row per report.
std::string to_table(const std::vector<VerificationReport>& reports);

/// True when any report carries status fail (suspect and error are excluded).
bool has_failures(const std::vector<VerificationReport>& reports);

}  // namespace theta_forge
