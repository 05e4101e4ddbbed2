#include "theta_forge/report.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "theta_forge/errors.hpp"

namespace theta_forge {

namespace {

constexpr std::array<std::string_view, 4> kKindNames{"value", "relation", "derivation", "discovery"};
constexpr std::array<std::string_view, 4> kStatusNames{"pass", "fail", "suspect", "error"};

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(ReportKind kind) { return kKindNames.at(static_cast<size_t>(kind)); }
std::string_view to_string(ReportStatus status) { return kStatusNames.at(static_cast<size_t>(status)); }

ReportKind parse_report_kind(std::string_view text) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<ReportKind>(i);
  }
  throw UsageError("unknown report kind '" + std::string(text) + "'");
}

ReportStatus parse_report_status(std::string_view text) {
  for (size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == text) return static_cast<ReportStatus>(i);
  }
  throw UsageError("unknown report status '" + std::string(text) + "'");
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["kind"] = std::string(to_string(kind));
  j["status"] = std::string(to_string(status));
  j["residual"] = residual;
  j["digits"] = digits;
  j["elapsed_ms"] = elapsed_ms;
  j["note"] = note;
  return j;
}

VerificationReport VerificationReport::from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.id = j.at("id").get<std::string>();
  r.kind = parse_report_kind(j.at("kind").get<std::string>());
  r.status = parse_report_status(j.at("status").get<std::string>());
  r.residual = j.at("residual").get<std::string>();
  r.digits = j.at("digits").get<int>();
  r.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  r.note = j.at("note").get<std::string>();
  return r;
}

std::string format_residual(const BigReal& residual) { return residual.to_scientific(kResidualDigits); }

BigReal parse_residual(const std::string& text) {
  BigReal out(128);
  if (text == "nan") {
    mpfr_set_nan(out.get());
    return out;
  }
  return BigReal::from_string(text, 128);
}

BigReal pass_threshold(int digits, int slack, mpfr_prec_t bits) { return ten_to_minus(digits - slack, bits); }

std::string csv_header() { return "id,kind,status,residual,digits,elapsed_ms,note"; }

std::string to_csv_row(const VerificationReport& r) {
  std::ostringstream out;
  out << csv_escape(r.id) << ',' << to_string(r.kind) << ',' << to_string(r.status) << ','
      << r.residual << ',' << r.digits << ',' << r.elapsed_ms << ',' << csv_escape(r.note);
  return out.str();
}

std::string to_table(const std::vector<VerificationReport>& reports) {
  size_t id_width = 2;
  for (const auto& r : reports) id_width = std::max(id_width, r.id.size());
  std::ostringstream out;
  auto pad = [](std::string_view s, size_t w) {
    std::string t(s);
    if (t.size() < w) t.append(w - t.size(), ' ');
    return t;
  };
  out << pad("id", id_width) << "  " << pad("kind", 10) << "  " << pad("status", 7) << "  "
      << pad("residual", 13) << "  note\n";
  for (const auto& r : reports) {
    out << pad(r.id, id_width) << "  " << pad(to_string(r.kind), 10) << "  "
        << pad(to_string(r.status), 7) << "  " << pad(r.residual, 13) << "  " << r.note << '\n';
  }
  return out.str();
}

bool has_failures(const std::vector<VerificationReport>& reports) {
  return std::any_of(reports.begin(), reports.end(),
                     [](const VerificationReport& r) { return r.status == ReportStatus::fail; });
}

}  // namespace theta_forge
